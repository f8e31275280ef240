#pragma once

// Serial reference implementations of the data-parallel kernels, written as
// straight loops independent of the production code paths. Tests check the
// two agree; the bench target compares their speed.

#include <span>
#include <vector>

#include "atomflow/denoiser.hpp"
#include "atomflow/losses.hpp"
#include "atomflow/proteinio.hpp"

namespace atomflow::ref {

using geom3::Vec3;

double fape(const flowmatch::FrameSet& pred_frames,
            std::span<const Vec3> pred_atoms,
            const flowmatch::FrameSet& true_frames,
            std::span<const Vec3> true_atoms, double clamp, double z);

double distogram(std::span<const Vec3> pred_ca, std::span<const Vec3> true_ca);

double se3_fm(std::span<const Vec3> pred_vf_trans,
              std::span<const Vec3> true_vf_trans,
              std::span<const Vec3> pred_vf_rot,
              std::span<const Vec3> true_vf_rot);

double discrete(const seqflow::Logits& logits, const seqflow::Sequence& s1,
                std::span<const int> positions);

double consistency(const sampler::DenoiserOutput& a,
                   const sampler::DenoiserOutput& b, double t_s, double t_t,
                   const losses::ConsistencyConfig& cfg);

double correction(const seqflow::Logits& refined_logits,
                  const flowmatch::FrameSet& refined_frames,
                  const seqflow::Sequence& s1, const flowmatch::FrameSet& t1);

double chi(const allatom::TorsionTable& pred, const allatom::TorsionTable& truth,
           std::span<const std::array<bool, 4>> pi_periodic);

std::vector<proteinio::InterfacePair> interface_pairs(
    const proteinio::Complex& c, double cutoff);

// Numeric superposition oracle: Euler-angle grid search followed by greedy
// axis-angle refinement with shrinking steps. Returns the minimal RMSD.
double kabsch_grid_refine(std::span<const Vec3> a, std::span<const Vec3> b);

}  // namespace atomflow::ref
