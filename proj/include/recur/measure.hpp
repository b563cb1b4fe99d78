#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace recur {

/// Finite discrete measure sum_k mass[k] * delta_{atom[k]} on (0, infinity).
/// Atoms strictly increasing, masses nonnegative.
struct DiscreteMeasure {
  std::vector<double> atoms;
  std::vector<double> masses;

  DiscreteMeasure() = default;
  DiscreteMeasure(std::vector<double> atoms_in, std::vector<double> masses_in);

  std::size_t size() const { return atoms.size(); }

  /// Total mass of atoms in (0, upper].
  double total_mass(double upper) const;

  /// sum_{atoms t_k <= upper} mass_k * f(t_k).
  double integrate(const std::function<double(double)>& f, double upper) const;

  /// Index of first atom strictly above upper (== number of atoms kept).
  std::size_t count_within(double upper) const;
};

/// Equispaced atoms a, 2a, ..., ka with a = span/k and unit masses.
DiscreteMeasure equispaced_unit_measure(double span, std::size_t k);

}  // namespace recur
