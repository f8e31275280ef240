#pragma once

#include <span>
#include <vector>

#include "atomflow/allatom.hpp"
#include "atomflow/denoiser.hpp"
#include "atomflow/flowmatch.hpp"
#include "atomflow/geom3.hpp"
#include "atomflow/seqflow.hpp"

namespace atomflow::losses {

using flowmatch::FrameSet;
using geom3::Vec3;
using seqflow::Logits;
using seqflow::Sequence;

struct ConsistencyConfig {
  double coefficient = 0.00054;  // pseudo-Huber constant scale
  // Flattened comparison dimensions; 0 derives them from the shapes
  // (N * 21 for the sequence term, N * 12 for the structure term).
  int dim_s = 0;
  int dim_t = 0;
  double delta_t = 0.01;
  double weight = 0.3;  // weight of the consistency term in the total
};

struct FapeConfig {
  double clamp = 10.0;  // Å
  double z = 10.0;      // Å length scale
  bool backbone_only = false;
};

// Mean squared translation-field error plus mean squared rotation-tangent
// error.
double loss_se3_fm(std::span<const Vec3> pred_vf_trans,
                   std::span<const Vec3> true_vf_trans,
                   std::span<const Vec3> pred_vf_rot,
                   std::span<const Vec3> true_vf_rot);

// Mean cross-entropy of the true token under the amino-acid softmax
// (mask class excluded from normalization), over the given positions.
double loss_discrete(const Logits& logits, const Sequence& s1,
                     std::span<const int> positions);
double loss_discrete(const Logits& logits, const Sequence& s1);

// Pseudo-Huber penalty on the gap between predictions at adjacent times,
// scaled by t^2 per modality. pred_b is the teacher (treated as constant).
double loss_consistency(const sampler::DenoiserOutput& pred_a,
                        const sampler::DenoiserOutput& pred_b_teacher,
                        double t_s, double t_t, const ConsistencyConfig& cfg);

// Frame-aligned point error: mean over (frame, atom) pairs of the clamped
// local-coordinate distance, divided by z.
double loss_fape(const FrameSet& pred_frames, std::span<const Vec3> pred_atoms,
                 const FrameSet& true_frames, std::span<const Vec3> true_atoms,
                 const FapeConfig& cfg);

// Mean over ordered residue pairs (i != j) of squared pairwise-distance
// error. Needs N >= 2.
double loss_distogram(std::span<const Vec3> pred_ca,
                      std::span<const Vec3> true_ca);

// Cross-entropy of refined logits against s1, plus mean squared translation
// error, plus mean squared Frobenius rotation-matrix difference.
double loss_correction(const Logits& refined_logits,
                       const FrameSet& refined_frames, const Sequence& s1,
                       const FrameSet& t1);

// corr + 0.25 * fape_bb + 0.25 * dist.
double loss_refine_total(double corr, double fape_bb, double dist);

// Mean over defined chis of squared chord distance on the unit circle,
// minimized over declared pi-flips. Validity masks must match.
double loss_chi(const allatom::TorsionTable& pred,
                const allatom::TorsionTable& truth,
                std::span<const std::array<bool, 4>> pi_periodic);

// Per-residue pi-periodicity flags derived from the residue templates.
std::vector<std::array<bool, 4>> chi_symmetry_flags(const Sequence& seq);

}  // namespace atomflow::losses
