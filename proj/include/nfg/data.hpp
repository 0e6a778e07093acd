#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nfg/problems.hpp"

namespace nfg {

struct SparseEntry {
  std::uint32_t index;  // 0-based internal (LIBSVM files are 1-based)
  double value;
};

struct LabeledDataset {
  std::vector<std::vector<SparseEntry>> rows;
  std::vector<double> labels;
  std::size_t dimension = 0;

  std::size_t size() const { return rows.size(); }
};

// Line-oriented `<label> <idx>:<val> ...` with `#` comments and blank lines
// skipped. Every input yields a dataset or a located ParseError; indices
// within a row must be strictly increasing. Rows may extend the dimension
// (LIBSVM files carry no header).
LabeledDataset parse_libsvm(std::istream& in);
LabeledDataset parse_libsvm(std::string_view text);

std::string serialize_libsvm(const LabeledDataset& ds);

// Reads a file, transparently inflating gzip input (sniffed via the 2-byte
// magic header), then parses it.
LabeledDataset load_libsvm_file(const std::string& path);

// Scales each feature column to max |value| = 1 (optional; raw by default).
void apply_unit_feature_scaling(LabeledDataset& ds);

// Sigmoid least-squares objective over a dataset. Label mapping: {-1,+1} ->
// {0,1}; values already in [0,1] pass through; anything else is rejected.
SigmoidLsqProblem make_sigmoid_problem(const LabeledDataset& ds);

// Synthetic strongly convex quadratic suite: per-component curvatures sampled
// in [mu, L] with both endpoints present, anchors from a seeded standard
// normal.
QuadraticProblem make_quadratic_suite(std::size_t n, std::size_t d, double L, double mu,
                                      std::uint64_t seed);

// Synthetic sigmoid LSQ instance: standard normal rows, Bernoulli targets from
// a planted parameter vector.
SigmoidLsqProblem make_synthetic_sigmoid(std::size_t n, std::size_t d, std::uint64_t seed);

// Sparse binary-feature stand-in for the LIBSVM adult-income data: ~1/8 of the
// features active per row, labels in {-1,+1} from a planted logistic model.
// Returned as LIBSVM text so the parser sits on the load path.
std::string make_adult_standin_libsvm(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace nfg
