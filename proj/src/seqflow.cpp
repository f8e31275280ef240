#include "atomflow/seqflow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace atomflow::seqflow {

namespace {

constexpr std::array<char, 21> kOneLetter = {
    'A', 'R', 'N', 'D', 'C', 'Q', 'E', 'G', 'H', 'I', 'L',
    'K', 'M', 'F', 'P', 'S', 'T', 'W', 'Y', 'V', 'X'};

constexpr std::array<std::string_view, 21> kThreeLetter = {
    "ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS", "ILE",
    "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP", "TYR", "VAL",
    "UNK"};

}  // namespace

char token_to_char(Token t) {
  require(t < kVocabSize, Errc::invalid_argument, "token out of range");
  return kOneLetter[t];
}

std::optional<Token> token_from_char(char c) {
  for (int i = 0; i < kNumAminoAcids; ++i)
    if (kOneLetter[i] == c) return static_cast<Token>(i);
  if (c == 'X') return kMaskToken;
  return std::nullopt;
}

std::string_view token_to_name3(Token t) {
  require(t < kVocabSize, Errc::invalid_argument, "token out of range");
  return kThreeLetter[t];
}

std::optional<Token> token_from_name3(std::string_view name3) {
  for (int i = 0; i < kNumAminoAcids; ++i)
    if (kThreeLetter[i] == name3) return static_cast<Token>(i);
  return std::nullopt;
}

void DecodeConfig::validate() const {
  require(t_max > 0.0, Errc::config, "decode: t_max must be > 0");
  require(lambda >= 0.0, Errc::config, "decode: lambda must be >= 0");
  require(argmax_threshold >= 0.0 && argmax_threshold <= 1.0, Errc::config,
          "decode: argmax_threshold outside [0, 1]");
  require(blend_threshold >= 0.0 && blend_threshold <= 1.0, Errc::config,
          "decode: blend_threshold outside [0, 1]");
  require(std::abs(blend_seqbb + blend_refine - 1.0) < 1e-12, Errc::config,
          "decode: blend weights must sum to 1");
}

Sequence corrupt_sequence(const Sequence& s1, double t, Rng& rng) {
  require(t >= 0.0 && t <= 1.0, Errc::invalid_argument,
          "corrupt_sequence: t outside [0, 1]");
  Sequence out(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    require(s1[i] != kMaskToken, Errc::invalid_argument,
            "corrupt_sequence: input already contains MASK");
    out[i] = rng.uniform() < t ? s1[i] : kMaskToken;
  }
  return out;
}

Logits blend_logits(const Logits& seqbb, const Logits& refine, double t_s,
                    const DecodeConfig& cfg) {
  require(seqbb.rows() == refine.rows() && seqbb.cols() == refine.cols(),
          Errc::shape_mismatch, "blend_logits: shape mismatch");
  if (t_s < cfg.blend_threshold) return seqbb;
  return cfg.blend_seqbb * seqbb + cfg.blend_refine * refine;
}

double temperature(double t_s, const DecodeConfig& cfg) {
  return cfg.t_max * std::exp(-cfg.lambda * t_s);
}

Eigen::VectorXd softmax_amino_acids(
    const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Eigen::VectorXd p(kNumAminoAcids);
  double max_logit = row(0);
  for (int j = 1; j < kNumAminoAcids; ++j) max_logit = std::max(max_logit, row(j));
  double sum = 0.0;
  for (int j = 0; j < kNumAminoAcids; ++j) {
    p(j) = std::exp(row(j) - max_logit);
    sum += p(j);
  }
  p /= sum;
  return p;
}

Sequence sample_tokens(const Logits& logits, double t_s,
                       const DecodeConfig& cfg, Rng& rng) {
  require(logits.allFinite(), Errc::invalid_argument,
          "sample_tokens: non-finite logits");
  require(logits.cols() == kVocabSize, Errc::shape_mismatch,
          "sample_tokens: expected 21 logit columns");
  const auto n = logits.rows();
  Sequence out(static_cast<std::size_t>(n));
  if (t_s >= cfg.argmax_threshold) {
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      for (int j = 1; j < kNumAminoAcids; ++j)
        if (logits(i, j) > logits(i, best)) best = j;  // ties keep lower index
      out[static_cast<std::size_t>(i)] = static_cast<Token>(best);
    }
    return out;
  }
  const double temp = temperature(t_s, cfg);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd p = softmax_amino_acids(logits.row(i) / temp);
    const double u = rng.uniform();
    double acc = 0.0;
    int pick = kNumAminoAcids - 1;
    for (int j = 0; j < kNumAminoAcids; ++j) {
      acc += p(j);
      if (u < acc) {
        pick = j;
        break;
      }
    }
    out[static_cast<std::size_t>(i)] = static_cast<Token>(pick);
  }
  return out;
}

std::vector<double> score_positions(const Logits& logits,
                                    const Sequence& chosen, double t_s,
                                    Rng& rng) {
  require(static_cast<Eigen::Index>(chosen.size()) == logits.rows(),
          Errc::shape_mismatch, "score_positions: length mismatch");
  std::vector<double> scores(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    require(chosen[i] != kMaskToken, Errc::invalid_argument,
            "score_positions: chosen sequence contains MASK");
    const Eigen::VectorXd p =
        softmax_amino_acids(logits.row(static_cast<Eigen::Index>(i)));
    const double g = rng.gumbel();
    scores[i] = std::log(p(chosen[i])) + (1.0 - t_s) * g;
  }
  return scores;
}

Sequence remask_topk(const Sequence& chosen, const std::vector<double>& scores,
                     double t_next) {
  require(chosen.size() == scores.size(), Errc::shape_mismatch,
          "remask_topk: length mismatch");
  const auto n = chosen.size();
  const auto k = static_cast<std::size_t>(
      std::floor(t_next * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (scores[a] != scores[b]) return scores[a] > scores[b];
                     return a < b;
                   });
  Sequence out(n, kMaskToken);
  for (std::size_t r = 0; r < std::min(k, n); ++r)
    out[order[r]] = chosen[order[r]];
  return out;
}

}  // namespace atomflow::seqflow
