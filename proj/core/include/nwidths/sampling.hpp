#pragma once

#include <nwidths/exponents.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace nwidths {

// The sixteen labels a covered tuple can carry (1..5, 6a, 6b, 7a, 7b, 8, 9a, 9b, 10a, 10b, 11, 12).
std::vector<CaseId> covered_case_ids();

// Draws exponents on the 1/20 grid and s*, γ*, α*, μ* on the 1/8 grid until the
// tuple lands in `target` and passes check_hypotheses.
std::optional<AbstractParams> sample_admissible(std::mt19937_64& rng, const CaseId& target,
                                                int max_tries = 1'000'000);

// Round-robin over covered_case_ids(), `count` tuples in total.
std::vector<AbstractParams> sample_spanning(std::uint64_t seed, int count);

struct PartitionReport {
  int tuples = 0;
  int uncovered = 0;            // no case and no gap
  int case_overlaps = 0;        // tuples matching two or more cases before tie-break
  int gap_overlaps = 0;         // tuples matching two or more gaps (no case)
  // Gap overlaps other than a with c (p0 > q) or b with d (p1 > q), which the gap
  // conditions themselves imply.
  int unexpected_gap_overlaps = 0;
  int overlap_mismatches = 0;   // overlapping cases whose θ sets differ
  int boundary_checks = 0;      // subcase and a = b boundaries compared
  int boundary_mismatches = 0;
  bool ok() const { return uncovered == 0 && unexpected_gap_overlaps == 0 && overlap_mismatches == 0 && boundary_mismatches == 0; }
};

// Scans 1/p0, 1/p1 in {0, 1/d, ..., (d-1)/d} and 1/q in {1/d, ..., (d-1)/d}.
PartitionReport partition_scan(int denominator = 20);

}  // namespace nwidths
