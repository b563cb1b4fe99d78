#pragma once

// Internal helpers shared by the criterion and variance code paths: the
// weight measure reduced to its active atoms, the rescaled processes
// tabulated at those atoms, and a sorted view of the index values for
// windowed kernel sums.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "recur/kernel.hpp"
#include "recur/measure.hpp"
#include "recur/sample.hpp"

namespace recur::detail {

struct AtomGrid {
  std::vector<double> t;
  std::vector<double> mass;
  std::size_t size() const { return t.size(); }
};

// Atoms in (0, upper] with nonzero mass.
inline AtomGrid atoms_within(const DiscreteMeasure& w, double upper) {
  AtomGrid g;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w.atoms[k] <= upper && w.masses[k] != 0.0) {
      g.t.push_back(w.atoms[k]);
      g.mass.push_back(w.masses[k]);
    }
  }
  return g;
}

// Ymat[i][k] = rescaled process of subject i evaluated at atom k.
inline std::vector<std::vector<double>> rescaled_at_atoms(const KernelContext& ctx,
                                                          const AtomGrid& grid) {
  std::vector<std::vector<double>> ymat(ctx.Y.size(), std::vector<double>(grid.size()));
  for (std::size_t i = 0; i < ctx.Y.size(); ++i) {
    for (std::size_t k = 0; k < grid.size(); ++k) ymat[i][k] = ctx.Y[i](grid.t[k]);
  }
  return ymat;
}

struct SortedIndex {
  std::vector<double> v;            // index value per subject
  std::vector<std::size_t> ord;     // subject indices sorted by v
  std::vector<double> vsorted;      // v in sorted order

  // Half-open range [lo, hi) of sorted positions with |v - center| <= h.
  std::pair<std::size_t, std::size_t> window(double center, double h) const {
    auto lo = std::lower_bound(vsorted.begin(), vsorted.end(), center - h);
    auto hi = std::upper_bound(vsorted.begin(), vsorted.end(), center + h);
    return {static_cast<std::size_t>(lo - vsorted.begin()),
            static_cast<std::size_t>(hi - vsorted.begin())};
  }
};

inline SortedIndex build_sorted_index(const std::vector<double>& theta, const Sample& sample) {
  SortedIndex s;
  s.v = index_values(theta, sample);
  s.ord.resize(s.v.size());
  for (std::size_t i = 0; i < s.ord.size(); ++i) s.ord[i] = i;
  std::stable_sort(s.ord.begin(), s.ord.end(),
                   [&](std::size_t a, std::size_t b) { return s.v[a] < s.v[b]; });
  s.vsorted.resize(s.v.size());
  for (std::size_t i = 0; i < s.ord.size(); ++i) s.vsorted[i] = s.v[s.ord[i]];
  return s;
}

// Kernel density of the index values at each subject's own index, all
// subjects included, via the sorted windows.
inline std::vector<double> densities_at_subjects(const SortedIndex& s, const KernelSpec& spec,
                                                 std::size_t n) {
  std::vector<double> dens(n, 0.0);
  for (std::size_t pi = 0; pi < n; ++pi) {
    const std::size_t i = s.ord[pi];
    const auto [lo, hi] = s.window(s.v[i], spec.h);
    double acc = 0.0;
    for (std::size_t pj = lo; pj < hi; ++pj) {
      acc += kernel_eval(spec, (s.vsorted[pj] - s.v[i]) / spec.h);
    }
    dens[i] = acc / (static_cast<double>(n) * spec.h);
  }
  return dens;
}

}  // namespace recur::detail
