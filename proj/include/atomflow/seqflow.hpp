#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "atomflow/errors.hpp"
#include "atomflow/rng.hpp"

namespace atomflow::seqflow {

// Vocabulary: the 20 standard amino acids (tokens 0..19, order
// "ARNDCQEGHILKMFPSTWYV") plus a MASK token.
using Token = std::uint8_t;
inline constexpr int kNumAminoAcids = 20;
inline constexpr Token kMaskToken = 20;
inline constexpr int kVocabSize = 21;

using Sequence = std::vector<Token>;

// N x 21 score matrix; column kMaskToken is the mask class.
using Logits = Eigen::MatrixXd;

char token_to_char(Token t);  // 'X' for mask
std::optional<Token> token_from_char(char c);
std::string_view token_to_name3(Token t);
std::optional<Token> token_from_name3(std::string_view name3);

// Decoding hyperparameters; defaults are the reference values used
// throughout.
struct DecodeConfig {
  double t_max = 30.0;            // temperature at t_s = 0
  double lambda = 30.0;           // temperature decay rate
  double argmax_threshold = 0.85; // switch from sampling to argmax
  double blend_threshold = 0.8;   // refine logits mixed in from here
  double blend_seqbb = 0.8;
  double blend_refine = 0.2;

  void validate() const;
};

// Masked interpolant: each position keeps its token with probability t,
// otherwise becomes MASK. Input must be mask-free.
Sequence corrupt_sequence(const Sequence& s1, double t, Rng& rng);

// Below blend_threshold returns seqbb unchanged (bit-identical); otherwise
// the elementwise convex blend.
Logits blend_logits(const Logits& seqbb, const Logits& refine, double t_s,
                    const DecodeConfig& cfg);

// t_max * exp(-lambda * t_s).
double temperature(double t_s, const DecodeConfig& cfg);

// Per-row draw over the 20 amino-acid classes (mask excluded): temperature
// sampling below argmax_threshold, argmax with lowest-index tie-break above.
Sequence sample_tokens(const Logits& logits, double t_s,
                       const DecodeConfig& cfg, Rng& rng);

// Per-position confidence: log softmax probability of the chosen token (over
// the 20 amino-acid classes) plus (1 - t_s) times a Gumbel noise draw.
std::vector<double> score_positions(const Logits& logits,
                                    const Sequence& chosen, double t_s,
                                    Rng& rng);

// Keeps the K = floor(t_next * N) highest-scoring positions (ties keep the
// lower index) and masks the rest.
Sequence remask_topk(const Sequence& chosen, const std::vector<double>& scores,
                     double t_next);

// Softmax over the amino-acid classes only; the mask column is ignored.
Eigen::VectorXd softmax_amino_acids(const Eigen::Ref<const Eigen::RowVectorXd>& row);

}  // namespace atomflow::seqflow
