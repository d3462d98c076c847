#ifndef COUNTCOMPAT_JOINT_PMF_HPP
#define COUNTCOMPAT_JOINT_PMF_HPP

#include <cstddef>
#include <ostream>
#include <vector>

#include "countcompat/errors.hpp"

namespace countcompat {

// Dense probability tensor on {0..N}^n: the universal exchange object between
// constructors, checkers, oracles and the CLI.
struct JointPMF {
  int n = 0;          // dimension
  int N = 0;          // per-axis support bound
  double mass = 0.0;  // captured probability mass
  std::vector<double> p;

  JointPMF() = default;
  JointPMF(int dim, int bound) : n(dim), N(bound) {
    std::size_t sz = 1;
    for (int i = 0; i < dim; ++i) sz *= static_cast<std::size_t>(bound + 1);
    p.assign(sz, 0.0);
  }

  std::size_t side() const { return static_cast<std::size_t>(N + 1); }

  std::size_t index(const std::vector<int>& x) const {
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) idx = idx * side() + static_cast<std::size_t>(x[i]);
    return idx;
  }

  double at2(int i, int j) const { return p[static_cast<std::size_t>(i) * side() + j]; }
  double& at2(int i, int j) { return p[static_cast<std::size_t>(i) * side() + j]; }
  double at3(int i, int j, int k) const {
    return p[(static_cast<std::size_t>(i) * side() + j) * side() + k];
  }
  double& at3(int i, int j, int k) {
    return p[(static_cast<std::size_t>(i) * side() + j) * side() + k];
  }

  void recompute_mass() {
    mass = 0.0;
    for (double v : p) mass += v;
  }

  // Sum out all coordinates except `keep` (ascending order preserved).
  JointPMF marginal(const std::vector<int>& keep) const {
    JointPMF out(static_cast<int>(keep.size()), N);
    std::vector<int> x(n, 0);
    std::vector<int> y(keep.size(), 0);
    for (std::size_t flat = 0; flat < p.size(); ++flat) {
      std::size_t rem = flat;
      for (int i = n - 1; i >= 0; --i) {
        x[i] = static_cast<int>(rem % side());
        rem /= side();
      }
      for (std::size_t k = 0; k < keep.size(); ++k) y[k] = x[keep[k]];
      out.p[out.index(y)] += p[flat];
    }
    out.mass = mass;
    out.recompute_mass();
    return out;
  }
};

// CSV layout: row index = first coordinate, column index = second; 3-d
// tensors as one block per leading index, blank-line separated.
inline void write_csv(std::ostream& os, const JointPMF& j) {
  os.precision(17);
  os << "# countcompat-jointpmf n=" << j.n << " N=" << j.N << " mass=" << j.mass << "\n";
  const std::size_t s = j.side();
  if (j.n == 1) {
    for (std::size_t i = 0; i < s; ++i) os << (i ? "," : "") << j.p[i];
    os << "\n";
  } else if (j.n == 2) {
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t k = 0; k < s; ++k) os << (k ? "," : "") << j.at2(static_cast<int>(i), static_cast<int>(k));
      os << "\n";
    }
  } else if (j.n == 3) {
    for (std::size_t b = 0; b < s; ++b) {
      if (b) os << "\n";
      for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t k = 0; k < s; ++k)
          os << (k ? "," : "") << j.at3(static_cast<int>(b), static_cast<int>(i), static_cast<int>(k));
        os << "\n";
      }
    }
  } else {
    throw error("write_csv: only n <= 3 tensors are serialized");
  }
}

}  // namespace countcompat

#endif
