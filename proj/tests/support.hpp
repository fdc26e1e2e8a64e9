#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <tuple>
#include <vector>

#include "cmc/domain.hpp"
#include "cmc/mesh.hpp"
#include "cmc/solver.hpp"

// Solved continuation runs shared between test cases. Each (domain, h, H)
// combination is solved once per test binary.
namespace cmc::testing {

struct Family {
  ConvexDomain domain;
  std::shared_ptr<const TriMesh> mesh;
  ContinuationResult run;
  const GraphSolution& final() const { return run.steps.back(); }
};

inline const Family& family(const DomainSpec& spec, double h, double H = 1.0, int steps = 11) {
  using Key = std::tuple<int, std::vector<double>, double, double, int>;
  static std::mutex lock;
  static std::map<Key, std::unique_ptr<Family>> cache;
  const std::lock_guard<std::mutex> guard(lock);
  const Key key{static_cast<int>(spec.kind), spec.params, h, H, steps};
  auto it = cache.find(key);
  if (it == cache.end()) {
    ConvexDomain domain = build_domain(spec);
    auto mesh = std::make_shared<const TriMesh>(triangulate(domain, h));
    ContinuationResult run = continuation(mesh, H, uniform_schedule(steps));
    it = cache.emplace(key, std::make_unique<Family>(Family{std::move(domain), mesh, std::move(run)})).first;
  }
  return *it->second;
}

inline const Family& disc(double h = 0.05, double R = 1.0, double H = 1.0) {
  return family({DomainKind::disc, {R}}, h, H);
}

inline const Family& ellipse(double h = 0.05, double a = 1.5, double b = 1.0, double H = 1.0) {
  return family({DomainKind::ellipse, {a, b}}, h, H);
}

inline std::shared_ptr<const TriMesh> mesh_of(const DomainSpec& spec, double h) {
  return std::make_shared<const TriMesh>(triangulate(build_domain(spec), h));
}

/// Nodal samples of f.
template <class F>
std::vector<double> sample(const TriMesh& mesh, F&& f) {
  std::vector<double> out(mesh.num_nodes());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = f(mesh.node(static_cast<int>(n)));
  return out;
}

inline std::mt19937_64 rng(std::uint64_t seed = 12345) { return std::mt19937_64(seed); }

}  // namespace cmc::testing
