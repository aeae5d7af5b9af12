// Copyright 2026 The stereoeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stereoeval/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

#include "stereoeval/csv.hpp"
#include "stereoeval/error.hpp"
#include "stereoeval/util.hpp"

namespace stereoeval {

namespace {

using nlohmann::json;

double MeanOver(const QMap& q, std::span<const int> ids, const char* what) {
  if (ids.empty()) throw InvalidArgument(std::string(what) + " stereotype set is empty");
  double sum = 0.0;
  for (int id : ids) {
    auto it = q.find(id);
    if (it == q.end()) {
      throw InvalidArgument(std::string(what) + " stereotype " + std::to_string(id) +
                            " has no q score");
    }
    sum += it->second.q;
  }
  return sum / static_cast<double>(ids.size());
}

std::string JoinIds(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(ids[i]);
  }
  return out;
}

double Correlation(std::span<const double> xs, std::span<const double> ys, double mean_x,
                   double mean_y, double sxx, double syy) {
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  const double rho = sxy / std::sqrt(sxx * syy);
  return std::clamp(rho, -1.0, 1.0);
}

std::string Lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

json NullableNumber(const std::optional<double>& v) { return v ? json(*v) : json(); }

}  // namespace

QMap ComputeQScores(std::span<const SentenceScore> scores) {
  QMap q;
  if (scores.empty()) return q;
  const auto& first = scores.front();
  std::map<int, double> sums;
  for (const auto& s : scores) {
    if (s.model_id != first.model_id || s.lang != first.lang ||
        s.template_mode != first.template_mode) {
      throw InvalidArgument("ComputeQScores: scores mix (model, lang, mode) groups: (" +
                            first.model_id + "," + first.lang + "," +
                            std::string(ToString(first.template_mode)) + ") vs (" + s.model_id +
                            "," + s.lang + "," + std::string(ToString(s.template_mode)) + ")");
    }
    if (!IsValidStereotypeId(s.stereotype_id)) {
      throw InvalidArgument("score with stereotype id " + std::to_string(s.stereotype_id));
    }
    sums[s.stereotype_id] += s.r_masc;
    ++q[s.stereotype_id].n;
  }
  for (auto& [id, entry] : q) entry.q = sums[id] / static_cast<double>(entry.n);
  return q;
}

std::vector<int> MissingStereotypes(const QMap& q) {
  std::vector<int> missing;
  for (int id = 1; id <= kStereotypeCount; ++id) {
    if (!q.contains(id)) missing.push_back(id);
  }
  return missing;
}

std::map<int, int> MasculineRank(const QMap& q) {
  const auto missing = MissingStereotypes(q);
  if (!missing.empty()) {
    throw InvalidArgument("MasculineRank: missing stereotypes " + JoinIds(missing));
  }
  std::vector<int> order;
  for (const auto& [id, _] : q) {
    if (IsValidStereotypeId(id)) order.push_back(id);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return q.at(a).q > q.at(b).q; });
  std::map<int, int> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i + 1);
  return rank;
}

double ProxyDefault(const QMap& q, std::span<const int> feminine_ids,
                    std::span<const int> masculine_ids) {
  const double fem = MeanOver(q, feminine_ids, "feminine");
  const double masc = MeanOver(q, masculine_ids, "masculine");
  return (fem + masc) / 2.0;
}

std::map<int, double> Inclination(const QMap& q, double proxy) {
  if (!(proxy >= 0.0 && proxy <= 1.0)) {
    throw InvalidArgument("Inclination: proxy outside [0,1]");
  }
  std::map<int, double> out;
  for (const auto& [id, entry] : q) {
    const Gender g = StereotypeById(id).gender;
    out[id] = g == Gender::kFeminine ? proxy - entry.q : entry.q - proxy;
  }
  return out;
}

StereotypeRate ComputeStereotypeRate(const QMap& q, std::span<const int> feminine_ids,
                                     std::span<const int> masculine_ids) {
  StereotypeRate rate;
  rate.q_f = MeanOver(q, feminine_ids, "feminine");
  rate.q_m = MeanOver(q, masculine_ids, "masculine");
  if (rate.q_f == 0.0) throw UndefinedError("stereotype rate undefined: feminine mean q is 0");
  rate.g_s = rate.q_m / rate.q_f;
  return rate;
}

GroupSummary SummarizeGroup(std::span<const SentenceScore> scores,
                            std::span<const int> feminine_ids,
                            std::span<const int> masculine_ids) {
  if (scores.empty()) throw InvalidArgument("SummarizeGroup: no scores");
  GroupSummary out;
  out.overall.model_id = scores.front().model_id;
  out.overall.lang = scores.front().lang;
  out.overall.template_mode = scores.front().template_mode;

  const QMap q = ComputeQScores(scores);
  out.missing = MissingStereotypes(q);
  std::map<int, int> ranks;
  if (out.missing.empty()) {
    ranks = MasculineRank(q);
  } else {
    out.notes.push_back("stereotypes without sentences: " + JoinIds(out.missing) +
                        "; ranks not computed");
  }

  std::vector<int> fem, masc;
  for (int id : feminine_ids)
    if (q.contains(id)) fem.push_back(id);
  for (int id : masculine_ids)
    if (q.contains(id)) masc.push_back(id);
  if (fem.size() != feminine_ids.size() || masc.size() != masculine_ids.size()) {
    out.notes.push_back("proxy/g_s id sets restricted to present stereotypes");
  }

  double proxy = 0.0;
  if (fem.empty() || masc.empty()) {
    out.rate_defined = false;
    out.notes.push_back("proxy default and g_s undefined: an id set has no scored stereotypes");
  } else {
    proxy = ProxyDefault(q, fem, masc);
    out.overall.proxy_default = proxy;
    try {
      const auto rate = ComputeStereotypeRate(q, fem, masc);
      out.overall.q_f = rate.q_f;
      out.overall.q_m = rate.q_m;
      out.overall.g_s = rate.g_s;
    } catch (const Error& e) {
      out.rate_defined = false;
      out.notes.push_back(e.what());
    }
  }
  std::map<int, double> incl;
  if (out.rate_defined || (!fem.empty() && !masc.empty())) incl = Inclination(q, proxy);

  for (const auto& [id, entry] : q) {
    StereotypeSummary s;
    s.stereotype_id = id;
    s.q = entry.q;
    s.n = entry.n;
    if (auto it = ranks.find(id); it != ranks.end()) s.rank = it->second;
    if (auto it = incl.find(id); it != incl.end()) s.inclination = it->second;
    out.stereotypes.push_back(s);
  }
  return out;
}

PearsonResult Pearson(std::span<const double> xs, std::span<const double> ys,
                      std::size_t resamples, std::uint64_t seed) {
  if (xs.size() != ys.size()) throw InvalidArgument("Pearson: length mismatch");
  if (xs.size() < 3) throw InvalidArgument("Pearson: need at least 3 pairs");
  if (resamples == 0) throw InvalidArgument("Pearson: resamples must be >= 1");
  const double n = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    syy += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedError("Pearson: zero variance");

  PearsonResult result;
  result.rho = Correlation(xs, ys, mean_x, mean_y, sxx, syy);

  // Relative slack keeps permutations that tie the observed value counted.
  const double threshold = std::abs(result.rho) * (1.0 - 1e-12);
  std::vector<double> shuffled(ys.begin(), ys.end());
  std::mt19937_64 rng(seed);
  std::size_t extreme = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
      std::swap(shuffled[i], shuffled[UniformBelow(rng, i + 1)]);
    }
    if (std::abs(Correlation(xs, shuffled, mean_x, mean_y, sxx, syy)) >= threshold) ++extreme;
  }
  result.p = static_cast<double>(extreme + 1) / static_cast<double>(resamples + 1);
  return result;
}

std::optional<double> CohenKappa(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.size() != b.size()) throw InvalidArgument("CohenKappa: length mismatch");
  if (a.empty()) throw InvalidArgument("CohenKappa: no labels");
  std::map<std::string, std::uint64_t> count_a, count_b;
  std::uint64_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++count_a[a[i]];
    ++count_b[b[i]];
    if (a[i] == b[i]) ++agree;
  }
  const std::uint64_t n = a.size();
  std::uint64_t chance = 0;  // n^2 * p_e
  for (const auto& [label, ca] : count_a) {
    auto it = count_b.find(label);
    if (it != count_b.end()) chance += ca * it->second;
  }
  if (chance == n * n) return std::nullopt;
  // (p_o - p_e) / (1 - p_e) with both scaled by n^2; operands are exact integers.
  const double numerator = static_cast<double>(agree * n) - static_cast<double>(chance);
  const double denominator = static_cast<double>(n * n) - static_cast<double>(chance);
  return numerator / denominator;
}

std::string_view ToString(GenderLabel label) {
  switch (label) {
    case GenderLabel::kNeutral: return "neutral";
    case GenderLabel::kMasculine: return "masculine";
    case GenderLabel::kFeminine: return "feminine";
    case GenderLabel::kUnsure: return "unsure";
  }
  return "unsure";
}

std::optional<GenderLabel> ParseGenderLabel(std::string_view text) {
  const std::string lower = Lower(Trim(text));
  if (lower == "neutral") return GenderLabel::kNeutral;
  if (lower == "masculine") return GenderLabel::kMasculine;
  if (lower == "feminine") return GenderLabel::kFeminine;
  if (lower == "unsure") return GenderLabel::kUnsure;
  return std::nullopt;
}

std::vector<AnnotationRecord> ParseAnnotationCsv(std::string_view content) {
  const auto rows = ParseCsv(content);
  std::vector<AnnotationRecord> out;
  std::size_t r = 0;
  while (r < rows.size() && rows[r].fields.size() == 1 && Trim(rows[r].fields[0]).empty()) ++r;
  if (r == rows.size()) return out;

  std::map<std::string, std::size_t> column;
  for (std::size_t c = 0; c < rows[r].fields.size(); ++c) {
    column[Lower(Trim(rows[r].fields[c]))] = c;
  }
  for (const char* name : {"sentence_id", "annotator_id", "da_score", "gender_label"}) {
    if (!column.contains(name)) {
      throw DataError("line " + std::to_string(rows[r].line) + ": missing column '" + name + "'");
    }
  }
  const std::size_t sid = column["sentence_id"], aid = column["annotator_id"],
                    da = column["da_score"], gl = column["gender_label"];
  const std::size_t needed = std::max({sid, aid, da, gl}) + 1;

  std::set<std::pair<std::string, std::string>> seen;
  for (++r; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "line " + std::to_string(row.line) + ": ";
    if (row.fields.size() == 1 && Trim(row.fields[0]).empty()) continue;
    if (row.fields.size() < needed) throw DataError(where + "too few columns");
    AnnotationRecord rec;
    rec.sentence_id = std::string(Trim(row.fields[sid]));
    rec.annotator_id = std::string(Trim(row.fields[aid]));
    if (rec.sentence_id.empty() || rec.annotator_id.empty()) {
      throw DataError(where + "empty sentence_id or annotator_id");
    }
    const auto score_text = Trim(row.fields[da]);
    double score = 0.0;
    auto [end, ec] = std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
    if (ec != std::errc() || end != score_text.data() + score_text.size() ||
        score != std::floor(score) || score < 0.0 || score > 100.0) {
      throw DataError(where + "da_score must be an integer in [0,100], got '" +
                      std::string(score_text) + "'");
    }
    rec.da_score = static_cast<int>(score);
    const auto label = ParseGenderLabel(row.fields[gl]);
    if (!label) throw DataError(where + "unknown gender_label '" + row.fields[gl] + "'");
    rec.gender_label = *label;
    if (!seen.emplace(rec.sentence_id, rec.annotator_id).second) {
      throw DataError(where + "duplicate annotation of " + rec.sentence_id + " by " +
                      rec.annotator_id);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

json ComputeAgreement(std::span<const AnnotationRecord> records, const AgreementOptions& options) {
  // annotator -> sentence -> record
  std::map<std::string, std::map<std::string, const AnnotationRecord*>> by_annotator;
  for (const auto& rec : records) by_annotator[rec.annotator_id][rec.sentence_id] = &rec;

  json annotators = json::array();
  double da_sum = 0.0;
  std::size_t da_n = 0;
  for (const auto& [annotator, sentences] : by_annotator) {
    double sum = 0.0;
    std::size_t compared = 0, matched = 0;
    for (const auto& [sentence, rec] : sentences) {
      sum += rec->da_score;
      if (auto it = options.system_labels.find(sentence); it != options.system_labels.end()) {
        ++compared;
        if (it->second == rec->gender_label) ++matched;
      }
    }
    da_sum += sum;
    da_n += sentences.size();
    annotators.push_back(
        {{"annotator_id", annotator},
         {"n", sentences.size()},
         {"mean_da", sum / static_cast<double>(sentences.size())},
         {"n_system_compared", compared},
         {"system_label_agreement",
          compared ? json(static_cast<double>(matched) / static_cast<double>(compared)) : json()}});
  }

  json pairs = json::array();
  double rho_sum = 0.0, kappa_sum = 0.0;
  std::size_t rho_n = 0, kappa_n = 0, shared_total = 0, disagree_total = 0;
  for (auto a = by_annotator.begin(); a != by_annotator.end(); ++a) {
    for (auto b = std::next(a); b != by_annotator.end(); ++b) {
      std::vector<double> xs, ys;
      std::vector<std::string> la, lb;
      std::size_t disagreements = 0;
      for (const auto& [sentence, rec_a] : a->second) {
        auto it = b->second.find(sentence);
        if (it == b->second.end()) continue;
        xs.push_back(rec_a->da_score);
        ys.push_back(it->second->da_score);
        la.emplace_back(ToString(rec_a->gender_label));
        lb.emplace_back(ToString(it->second->gender_label));
        if (rec_a->gender_label != it->second->gender_label) ++disagreements;
      }
      json pair = {{"annotator_a", a->first},
                   {"annotator_b", b->first},
                   {"n_shared", xs.size()},
                   {"n_label_disagreements", disagreements}};
      std::optional<double> rho, p, kappa;
      std::string pearson_note, kappa_note;
      try {
        const auto pr = Pearson(xs, ys, options.resamples, options.seed);
        rho = pr.rho;
        p = pr.p;
        rho_sum += pr.rho;
        ++rho_n;
      } catch (const Error& e) {
        pearson_note = e.what();
      }
      if (la.empty()) {
        kappa_note = "no shared sentences";
      } else if (auto k = CohenKappa(la, lb)) {
        kappa = *k;
        kappa_sum += *k;
        ++kappa_n;
      } else {
        kappa_note = "not calculable: no variation in labels";
      }
      pair["pearson_rho"] = NullableNumber(rho);
      pair["pearson_p"] = NullableNumber(p);
      pair["pearson_note"] = pearson_note;
      pair["kappa"] = NullableNumber(kappa);
      pair["kappa_note"] = kappa_note;
      shared_total += xs.size();
      disagree_total += disagreements;
      pairs.push_back(std::move(pair));
    }
  }

  json summary = {
      {"n_annotators", by_annotator.size()},
      {"n_pairs", pairs.size()},
      {"mean_da", da_n ? json(da_sum / static_cast<double>(da_n)) : json()},
      {"mean_pearson_rho", rho_n ? json(rho_sum / static_cast<double>(rho_n)) : json()},
      {"mean_kappa", kappa_n ? json(kappa_sum / static_cast<double>(kappa_n)) : json()},
      {"label_disagreement_rate",
       shared_total ? json(static_cast<double>(disagree_total) / static_cast<double>(shared_total))
                    : json()},
      {"pearson_resamples", options.resamples},
      {"seed", options.seed}};
  return json{{"annotators", annotators}, {"pairs", pairs}, {"summary", summary}};
}

std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("UniformBelow: bound must be positive");
  // Rejection sampling over the largest multiple of bound.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

std::vector<DatasetEntry> SampleValidationBatch(std::span<const DatasetEntry> dataset,
                                                std::size_t n, std::uint64_t seed) {
  if (dataset.empty()) throw InvalidArgument("SampleValidationBatch: empty dataset");
  if (n > dataset.size()) {
    throw InvalidArgument("SampleValidationBatch: n=" + std::to_string(n) + " exceeds dataset size " +
                          std::to_string(dataset.size()));
  }
  std::vector<std::size_t> gendered, neutral;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (dataset[i].kind == EntryKind::kGendered ? gendered : neutral).push_back(i);
  }
  const auto want_gendered = static_cast<std::size_t>(std::llround(
      static_cast<double>(n) * static_cast<double>(gendered.size()) /
      static_cast<double>(dataset.size())));
  const std::size_t want_neutral = n - want_gendered;

  std::mt19937_64 rng(seed);
  auto draw = [&rng](std::vector<std::size_t>& pool, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(pool[i], pool[i + UniformBelow(rng, pool.size() - i)]);
    }
    pool.resize(k);
  };
  draw(gendered, want_gendered);
  draw(neutral, want_neutral);

  std::vector<std::size_t> chosen = gendered;
  chosen.insert(chosen.end(), neutral.begin(), neutral.end());
  std::sort(chosen.begin(), chosen.end());
  std::vector<DatasetEntry> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(dataset[i]);
  return out;
}

}  // namespace stereoeval
