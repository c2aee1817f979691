#include "fluency/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "fluency/error.hpp"
#include "fluency/simd/kernels.hpp"

namespace fluency {

namespace {

std::vector<double> centred(std::span<const double> x) {
  const double mean = simd::sum(x) / static_cast<double>(x.size());
  std::vector<double> out(x.begin(), x.end());
  for (auto& v : out) v -= mean;
  return out;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double pearson(std::span<const double> h, std::span<const double> f) {
  if (h.size() != f.size()) {
    throw DataError("pearson: length mismatch (" + std::to_string(h.size()) + " vs " +
                    std::to_string(f.size()) + ")");
  }
  if (h.size() < 2) throw DataError("pearson: need at least two samples");
  const auto hc = centred(h);
  const auto fc = centred(f);
  const double shh = simd::dot(hc, hc);
  const double sff = simd::dot(fc, fc);
  if (shh == 0.0 || sff == 0.0) {
    throw DataError("pearson: correlation undefined for a constant vector");
  }
  const double r = simd::dot(hc, fc) / (std::sqrt(shh) * std::sqrt(sff));
  return std::clamp(r, -1.0, 1.0);
}

double spearman(std::span<const double> h, std::span<const double> f) {
  const auto rh = average_ranks(h);
  const auto rf = average_ranks(f);
  return pearson(rh, rf);
}

CorrelationReport evaluate(std::span<const FluencyScore> scores,
                           std::span<const HumanRating> ratings) {
  std::unordered_map<std::string_view, const FluencyScore*> by_id;
  for (const auto& s : scores) {
    if (!by_id.emplace(s.sentence_id, &s).second) {
      throw DataError("duplicate score id " + s.sentence_id);
    }
  }
  std::vector<const HumanRating*> sorted;
  for (const auto& r : ratings) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->sentence_id < b->sentence_id; });

  CorrelationReport report;
  std::vector<double> h, f;
  std::unordered_map<std::string_view, bool> matched;
  std::map<int, double> label_sum;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const HumanRating& r = *sorted[i];
    if (i > 0 && sorted[i - 1]->sentence_id == r.sentence_id) {
      throw DataError("duplicate rating id " + r.sentence_id);
    }
    auto it = by_id.find(r.sentence_id);
    if (it == by_id.end()) {
      report.unmatched_rating_ids.push_back(r.sentence_id);
      continue;
    }
    matched[r.sentence_id] = true;
    h.push_back(r.score);
    f.push_back(it->second->slor);
    label_sum[r.score] += it->second->slor;
    ++report.per_label_count[r.score];
  }
  for (const auto& s : scores) {
    if (!matched.count(s.sentence_id)) report.unmatched_score_ids.push_back(s.sentence_id);
  }
  std::sort(report.unmatched_score_ids.begin(), report.unmatched_score_ids.end());
  if (h.size() < 2) {
    throw DataError("evaluate: need at least two matched ids, have " + std::to_string(h.size()));
  }
  report.n = h.size();
  report.pearson_r = pearson(h, f);
  try {
    report.spearman_rho = spearman(h, f);
  } catch (const DataError&) {
  }
  for (const auto& [label, total] : label_sum) {
    report.per_label_mean_slor[label] =
        total / static_cast<double>(report.per_label_count[label]);
  }
  return report;
}

std::vector<HumanRating> read_ratings(const std::filesystem::path& path) {
  const auto lines = strip_meta(read_lines(path));
  if (lines.empty() || !lines[0].starts_with("id\t")) {
    throw DataError(path.string() + ": missing ratings header row");
  }
  std::vector<HumanRating> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], '\t');
    if (f.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": expected 2 columns");
    }
    const auto score = parse_int(f[1]);
    if (score < 0 || score > 3) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": rating outside 0..3");
    }
    out.push_back({std::string(f[0]), static_cast<int>(score)});
  }
  return out;
}

std::string render_report(const CorrelationReport& report,
                          const std::optional<Provenance>& provenance) {
  std::string out;
  if (provenance) out += meta_line(*provenance) + "\n";
  out += "Fluency score evaluation\n";
  out += "  matched pairs        " + std::to_string(report.n) + "\n";
  out += "  Pearson r            " + format_g9(report.pearson_r) + "\n";
  out += "  Spearman rho (info)  " +
         (report.spearman_rho ? format_g9(*report.spearman_rho) : std::string("undefined")) + "\n";
  for (const auto& [label, count] : report.per_label_count) {
    out += "  label " + std::to_string(label) + "  n=" + std::to_string(count) +
           "  mean score=" + format_g9(report.per_label_mean_slor.at(label)) + "\n";
  }
  out += "  unmatched score ids  " + std::to_string(report.unmatched_score_ids.size()) + "\n";
  out += "  unmatched rating ids " + std::to_string(report.unmatched_rating_ids.size()) + "\n";

  auto join = [](const std::vector<std::string>& ids) {
    std::string s;
    for (const auto& id : ids) s += (s.empty() ? "" : ",") + id;
    return s;
  };
  out += "\n[metrics]\n";
  out += "pearson_r=" + format_exact(report.pearson_r) + "\n";
  out += "spearman_rho=" +
         (report.spearman_rho ? format_exact(*report.spearman_rho) : std::string("nan")) + "\n";
  out += "n=" + std::to_string(report.n) + "\n";
  for (const auto& [label, count] : report.per_label_count) {
    out += "label_" + std::to_string(label) + "_count=" + std::to_string(count) + "\n";
    out += "label_" + std::to_string(label) +
           "_mean_slor=" + format_exact(report.per_label_mean_slor.at(label)) + "\n";
  }
  out += "unmatched_score_ids=" + join(report.unmatched_score_ids) + "\n";
  out += "unmatched_rating_ids=" + join(report.unmatched_rating_ids) + "\n";
  return out;
}

}  // namespace fluency
