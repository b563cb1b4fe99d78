#include "recur/measure.hpp"

#include <algorithm>
#include <cstddef>
#include <utility>

#include "recur/errors.hpp"

namespace recur {

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms_in, std::vector<double> masses_in)
    : atoms(std::move(atoms_in)), masses(std::move(masses_in)) {
  if (atoms.size() != masses.size()) {
    throw DimensionMismatch("measure: atoms and masses differ in length");
  }
  if (!atoms.empty() && atoms.front() <= 0.0) {
    throw ConfigError("measure: atoms must be strictly positive");
  }
  for (std::size_t k = 1; k < atoms.size(); ++k) {
    if (!(atoms[k - 1] < atoms[k])) {
      throw TieViolation("measure: atoms must be strictly increasing");
    }
  }
  for (double m : masses) {
    if (!(m >= 0.0)) {
      throw ConfigError("measure: masses must be nonnegative");
    }
  }
}

std::size_t DiscreteMeasure::count_within(double upper) const {
  auto it = std::upper_bound(atoms.begin(), atoms.end(), upper);
  return static_cast<std::size_t>(it - atoms.begin());
}

double DiscreteMeasure::total_mass(double upper) const {
  double s = 0.0;
  std::size_t m = count_within(upper);
  for (std::size_t k = 0; k < m; ++k) s += masses[k];
  return s;
}

double DiscreteMeasure::integrate(const std::function<double(double)>& f, double upper) const {
  double s = 0.0;
  std::size_t m = count_within(upper);
  for (std::size_t k = 0; k < m; ++k) s += masses[k] * f(atoms[k]);
  return s;
}

DiscreteMeasure equispaced_unit_measure(double span, std::size_t k) {
  if (!(span > 0.0) || k == 0) {
    throw ConfigError("equispaced measure: span must be positive and k >= 1");
  }
  std::vector<double> atoms(k), masses(k, 1.0);
  const double a = span / static_cast<double>(k);
  for (std::size_t j = 0; j < k; ++j) atoms[j] = a * static_cast<double>(j + 1);
  return DiscreteMeasure(std::move(atoms), std::move(masses));
}

}  // namespace recur
