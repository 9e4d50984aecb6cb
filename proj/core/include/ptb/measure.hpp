#pragma once

#include <vector>

#include "ptb/model.hpp"

namespace ptb {

// Observations stored as atom indices into the model's y and z lists.
struct Sample {
  std::vector<Index> y;
  std::vector<Index> z;

  std::size_t n() const { return y.size(); }
  void push(Index yi, Index zi) {
    y.push_back(yi);
    z.push_back(zi);
  }
};

// Probability weights on the support cells, laid out as cell = y * |z| + z.
struct WeightedMeasure {
  std::size_t ny = 0;
  std::size_t nz = 0;
  std::vector<double> weights;

  static WeightedMeasure empirical(const SupportSpec& support, const Sample& sample);
  static WeightedMeasure from_weights(const SupportSpec& support, std::vector<double> weights);

  double at(Index y, Index z) const { return weights[y * nz + z]; }
  // Throws ContractError unless weights are non-negative and sum to 1 within 1e-12.
  void validate() const;
  bool matches(const SupportSpec& support) const { return ny == support.y.size() && nz == support.z.size(); }

  static WeightedMeasure mixture(const WeightedMeasure& a, const WeightedMeasure& b, double alpha);
};

// Per-cell observation counts of a sample.
std::vector<double> cell_counts(const SupportSpec& support, const Sample& sample);

}  // namespace ptb
