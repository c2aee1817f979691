#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluency/scorer.hpp"
#include "fluency/text_io.hpp"

namespace fluency {

struct HumanRating {
  std::string sentence_id;
  int score = 0;  // 0..3
};

struct CorrelationReport {
  double pearson_r = 0.0;
  // Rank correlation for debugging only; empty when undefined.
  std::optional<double> spearman_rho;
  std::size_t n = 0;
  std::map<int, double> per_label_mean_slor;
  std::map<int, std::size_t> per_label_count;
  // Sorted ids present on one side only.
  std::vector<std::string> unmatched_score_ids;
  std::vector<std::string> unmatched_rating_ids;
};

// Pearson product-moment correlation, computed in mean-centred two-pass form.
// Throws DataError on a length mismatch, fewer than two samples or a constant
// vector (zero denominator).
double pearson(std::span<const double> h, std::span<const double> f);

// Pearson over average ranks (ties share the mean rank).
double spearman(std::span<const double> h, std::span<const double> f);

// Joins on sentence id (order-independent) and correlates score against
// rating. Throws DataError with fewer than two matches or duplicate ids.
CorrelationReport evaluate(std::span<const FluencyScore> scores,
                           std::span<const HumanRating> ratings);

std::vector<HumanRating> read_ratings(const std::filesystem::path& path);

// Human-readable summary followed by a [metrics] key=value section.
std::string render_report(const CorrelationReport& report,
                          const std::optional<Provenance>& provenance);

}  // namespace fluency
