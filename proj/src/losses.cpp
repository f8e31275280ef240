#include "atomflow/losses.hpp"

#include <cmath>

namespace atomflow::losses {

namespace {

// Softmax over the full 21-class vocabulary, used by the consistency KL.
Eigen::VectorXd softmax_full(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Eigen::VectorXd p(row.size());
  const double m = row.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    p(j) = std::exp(row(j) - m);
    sum += p(j);
  }
  p /= sum;
  return p;
}

double pseudo_huber(double value, double c) {
  return std::sqrt(value * value + c * c) - c;
}

}  // namespace

double loss_se3_fm(std::span<const Vec3> pred_vf_trans,
                   std::span<const Vec3> true_vf_trans,
                   std::span<const Vec3> pred_vf_rot,
                   std::span<const Vec3> true_vf_rot) {
  const auto n = pred_vf_trans.size();
  require(n == true_vf_trans.size() && n == pred_vf_rot.size() &&
              n == true_vf_rot.size() && n > 0,
          Errc::shape_mismatch, "loss_se3_fm: length mismatch");
  double trans = 0.0, rot = 0.0;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) reduction(+ : trans, rot)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    trans += (pred_vf_trans[i] - true_vf_trans[i]).squaredNorm();
    rot += (pred_vf_rot[i] - true_vf_rot[i]).squaredNorm();
  }
  return trans / static_cast<double>(n) + rot / static_cast<double>(n);
}

double loss_discrete(const Logits& logits, const Sequence& s1,
                     std::span<const int> positions) {
  require(static_cast<Eigen::Index>(s1.size()) == logits.rows(),
          Errc::shape_mismatch, "loss_discrete: length mismatch");
  require(!positions.empty(), Errc::invalid_argument,
          "loss_discrete: empty position set");
  for (const int i : positions) {
    require(i >= 0 && i < static_cast<int>(s1.size()), Errc::invalid_argument,
            "loss_discrete: position out of range");
    require(s1[static_cast<std::size_t>(i)] != seqflow::kMaskToken,
            Errc::invalid_argument, "loss_discrete: masked truth position");
  }
  double total = 0.0;
  const auto count = static_cast<std::ptrdiff_t>(positions.size());
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const int i = positions[k];
    const Eigen::VectorXd p = seqflow::softmax_amino_acids(logits.row(i));
    total += -std::log(p(s1[static_cast<std::size_t>(i)]));
  }
  return total / static_cast<double>(positions.size());
}

double loss_discrete(const Logits& logits, const Sequence& s1) {
  std::vector<int> all(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) all[i] = static_cast<int>(i);
  return loss_discrete(logits, s1, all);
}

double loss_consistency(const sampler::DenoiserOutput& pred_a,
                        const sampler::DenoiserOutput& pred_b_teacher,
                        double t_s, double t_t, const ConsistencyConfig& cfg) {
  const auto& a = pred_a;
  const auto& b = pred_b_teacher;
  require(a.logits.rows() == b.logits.rows() &&
              a.logits.cols() == b.logits.cols() &&
              a.frames.size() == b.frames.size() &&
              a.frames.size() == static_cast<std::size_t>(a.logits.rows()),
          Errc::shape_mismatch, "loss_consistency: shape mismatch");
  const auto n = static_cast<std::ptrdiff_t>(a.frames.size());
  require(n > 0, Errc::shape_mismatch, "loss_consistency: empty prediction");

  double kl = 0.0, mse_trans = 0.0, mse_rot = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : kl, mse_trans, mse_rot)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Eigen::VectorXd pa = softmax_full(a.logits.row(i));
    const Eigen::VectorXd pb = softmax_full(b.logits.row(i));
    for (Eigen::Index j = 0; j < pa.size(); ++j)
      kl += pa(j) * (std::log(pa(j)) - std::log(pb(j)));
    mse_trans +=
        (a.frames[i].translation - b.frames[i].translation).squaredNorm();
    mse_rot += (geom3::mat2vec(a.frames[i].rotation) -
                geom3::mat2vec(b.frames[i].rotation))
                   .squaredNorm();
  }
  const double nn = static_cast<double>(n);
  kl /= nn;
  const double mse_total = mse_trans / nn + mse_rot / nn;

  const double dim_s =
      cfg.dim_s > 0 ? cfg.dim_s : nn * static_cast<double>(a.logits.cols());
  const double dim_t = cfg.dim_t > 0 ? cfg.dim_t : nn * 12.0;
  const double c_s = cfg.coefficient * std::sqrt(dim_s);
  const double c_t = cfg.coefficient * std::sqrt(dim_t);
  return t_s * t_s * pseudo_huber(kl, c_s) +
         t_t * t_t * pseudo_huber(mse_total, c_t);
}

double loss_fape(const FrameSet& pred_frames, std::span<const Vec3> pred_atoms,
                 const FrameSet& true_frames, std::span<const Vec3> true_atoms,
                 const FapeConfig& cfg) {
  require(pred_frames.size() == true_frames.size() &&
              pred_atoms.size() == true_atoms.size(),
          Errc::shape_mismatch, "loss_fape: count mismatch");
  require(!pred_frames.empty() && !pred_atoms.empty(), Errc::shape_mismatch,
          "loss_fape: empty input");
  const auto nf = static_cast<std::ptrdiff_t>(pred_frames.size());
  const auto na = static_cast<std::ptrdiff_t>(pred_atoms.size());
  double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (std::ptrdiff_t i = 0; i < nf; ++i) {
    const auto& pf = pred_frames[i];
    const auto& tf = true_frames[i];
    for (std::ptrdiff_t j = 0; j < na; ++j) {
      const double d =
          (pf.apply_inverse(pred_atoms[j]) - tf.apply_inverse(true_atoms[j]))
              .norm();
      total += std::min(cfg.clamp, d);
    }
  }
  return total / (static_cast<double>(nf) * static_cast<double>(na) * cfg.z);
}

double loss_distogram(std::span<const Vec3> pred_ca,
                      std::span<const Vec3> true_ca) {
  const auto n = static_cast<std::ptrdiff_t>(pred_ca.size());
  require(pred_ca.size() == true_ca.size(), Errc::shape_mismatch,
          "loss_distogram: length mismatch");
  require(n >= 2, Errc::invalid_argument, "loss_distogram: need N >= 2");
  double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d_pred = (pred_ca[i] - pred_ca[j]).norm();
      const double d_true = (true_ca[i] - true_ca[j]).norm();
      total += (d_pred - d_true) * (d_pred - d_true);
    }
  }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double loss_correction(const Logits& refined_logits,
                       const FrameSet& refined_frames, const Sequence& s1,
                       const FrameSet& t1) {
  require(refined_frames.size() == t1.size() &&
              refined_frames.size() == s1.size() &&
              static_cast<Eigen::Index>(s1.size()) == refined_logits.rows(),
          Errc::shape_mismatch, "loss_correction: shape mismatch");
  const auto n = static_cast<std::ptrdiff_t>(t1.size());
  double trans = 0.0, rot = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : trans, rot)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    trans +=
        (refined_frames[i].translation - t1[i].translation).squaredNorm();
    rot += (refined_frames[i].rotation.matrix() - t1[i].rotation.matrix())
               .squaredNorm();
  }
  return loss_discrete(refined_logits, s1) + trans / static_cast<double>(n) +
         rot / static_cast<double>(n);
}

double loss_refine_total(double corr, double fape_bb, double dist) {
  require(std::isfinite(corr) && std::isfinite(fape_bb) && std::isfinite(dist),
          Errc::invalid_argument, "loss_refine_total: non-finite input");
  return corr + 0.25 * fape_bb + 0.25 * dist;
}

double loss_chi(const allatom::TorsionTable& pred,
                const allatom::TorsionTable& truth,
                std::span<const std::array<bool, 4>> pi_periodic) {
  require(pred.size() == truth.size() && pred.size() == pi_periodic.size(),
          Errc::shape_mismatch, "loss_chi: length mismatch");
  const auto n = static_cast<std::ptrdiff_t>(pred.size());
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < 4; ++k)
      require(pred[i].defined[k] == truth[i].defined[k], Errc::shape_mismatch,
              "loss_chi: validity mask mismatch");
  double total = 0.0;
  std::ptrdiff_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : total, count)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (int k = 0; k < 4; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      if (!pred[i].defined[ks]) continue;
      const double a = pred[i].chi[ks];
      const double b = truth[i].chi[ks];
      double d = 2.0 - 2.0 * std::cos(a - b);
      if (pi_periodic[i][ks])
        d = std::min(d, 2.0 - 2.0 * std::cos(a - b - M_PI));
      total += d;
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

std::vector<std::array<bool, 4>> chi_symmetry_flags(const Sequence& seq) {
  std::vector<std::array<bool, 4>> out(seq.size(), {false, false, false, false});
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] >= seqflow::kNumAminoAcids) continue;
    const auto& tpl = allatom::residue_template(seq[i]);
    for (int k = 0; k < tpl.chi_count(); ++k)
      out[i][static_cast<std::size_t>(k)] =
          tpl.chis[static_cast<std::size_t>(k)].pi_periodic;
  }
  return out;
}

}  // namespace atomflow::losses
