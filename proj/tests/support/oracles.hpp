#pragma once

#include <cstdint>
#include <vector>

// Brute-force reference implementations, written independently of the
// library: full sorts instead of partial selection, map-based tallies, and
// direct formula transcriptions. Tests compare both routes.
namespace oracle {

struct LofResult {
  std::vector<double> k_distance;
  std::vector<std::vector<size_t>> neighbors;  // ascending index
  std::vector<double> lrd;
  std::vector<double> lof;
};

LofResult brute_lof(const std::vector<std::vector<double>>& dist, size_t k);

std::vector<double> normalize(const std::vector<double>& scores);

int32_t tally_vote(const std::vector<int32_t>& votes, size_t n_classes);

double naive_distance(const std::vector<int32_t>& a, const std::vector<int32_t>& b);

double naive_accuracy(const std::vector<int32_t>& preds, const std::vector<int32_t>& truth);

struct Aggregate {
  double avg = 0.0;
  double min = 0.0;
  double max = 0.0;
  double sd = 0.0;
};

Aggregate naive_aggregate(const std::vector<double>& xs);

}  // namespace oracle
