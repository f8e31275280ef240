#include "atomflow/ref_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace atomflow::ref {

namespace {

// Local softmax helpers, deliberately not shared with the production code.
std::vector<double> softmax20(const seqflow::Logits& logits, int row) {
  std::vector<double> p(seqflow::kNumAminoAcids);
  double m = logits(row, 0);
  for (int j = 1; j < seqflow::kNumAminoAcids; ++j)
    m = std::max(m, logits(row, j));
  double sum = 0.0;
  for (int j = 0; j < seqflow::kNumAminoAcids; ++j) {
    p[static_cast<std::size_t>(j)] = std::exp(logits(row, j) - m);
    sum += p[static_cast<std::size_t>(j)];
  }
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> softmax21(const seqflow::Logits& logits, int row) {
  std::vector<double> p(seqflow::kVocabSize);
  double m = logits(row, 0);
  for (int j = 1; j < seqflow::kVocabSize; ++j) m = std::max(m, logits(row, j));
  double sum = 0.0;
  for (int j = 0; j < seqflow::kVocabSize; ++j) {
    p[static_cast<std::size_t>(j)] = std::exp(logits(row, j) - m);
    sum += p[static_cast<std::size_t>(j)];
  }
  for (auto& v : p) v /= sum;
  return p;
}

Vec3 to_local(const geom3::RigidTransform& frame, const Vec3& p) {
  return frame.rotation.matrix().transpose() * (p - frame.translation);
}

}  // namespace

double fape(const flowmatch::FrameSet& pred_frames,
            std::span<const Vec3> pred_atoms,
            const flowmatch::FrameSet& true_frames,
            std::span<const Vec3> true_atoms, double clamp, double z) {
  double total = 0.0;
  for (std::size_t i = 0; i < pred_frames.size(); ++i)
    for (std::size_t j = 0; j < pred_atoms.size(); ++j) {
      const Vec3 d = to_local(pred_frames[i], pred_atoms[j]) -
                     to_local(true_frames[i], true_atoms[j]);
      total += std::min(clamp, d.norm());
    }
  return total /
         (static_cast<double>(pred_frames.size()) *
          static_cast<double>(pred_atoms.size()) * z);
}

double distogram(std::span<const Vec3> pred_ca,
                 std::span<const Vec3> true_ca) {
  const auto n = pred_ca.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dp = (pred_ca[i] - pred_ca[j]).norm();
      const double dt = (true_ca[i] - true_ca[j]).norm();
      total += (dp - dt) * (dp - dt);
    }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double se3_fm(std::span<const Vec3> pred_vf_trans,
              std::span<const Vec3> true_vf_trans,
              std::span<const Vec3> pred_vf_rot,
              std::span<const Vec3> true_vf_rot) {
  const auto n = pred_vf_trans.size();
  double trans = 0.0, rot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    trans += (pred_vf_trans[i] - true_vf_trans[i]).squaredNorm();
    rot += (pred_vf_rot[i] - true_vf_rot[i]).squaredNorm();
  }
  return trans / static_cast<double>(n) + rot / static_cast<double>(n);
}

double discrete(const seqflow::Logits& logits, const seqflow::Sequence& s1,
                std::span<const int> positions) {
  double total = 0.0;
  for (const int i : positions) {
    const auto p = softmax20(logits, i);
    total += -std::log(p[s1[static_cast<std::size_t>(i)]]);
  }
  return total / static_cast<double>(positions.size());
}

double consistency(const sampler::DenoiserOutput& a,
                   const sampler::DenoiserOutput& b, double t_s, double t_t,
                   const losses::ConsistencyConfig& cfg) {
  const auto n = a.frames.size();
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto pa = softmax21(a.logits, static_cast<int>(i));
    const auto pb = softmax21(b.logits, static_cast<int>(i));
    for (std::size_t j = 0; j < pa.size(); ++j)
      kl += pa[j] * (std::log(pa[j]) - std::log(pb[j]));
  }
  kl /= static_cast<double>(n);

  double mse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mse += (a.frames[i].translation - b.frames[i].translation).squaredNorm() /
           static_cast<double>(n);
    const auto& ra = a.frames[i].rotation.matrix();
    const auto& rb = b.frames[i].rotation.matrix();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        mse += (ra(r, c) - rb(r, c)) * (ra(r, c) - rb(r, c)) /
               static_cast<double>(n);
  }

  const double dim_s =
      cfg.dim_s > 0 ? cfg.dim_s
                    : static_cast<double>(n) * seqflow::kVocabSize;
  const double dim_t = cfg.dim_t > 0 ? cfg.dim_t : static_cast<double>(n) * 12.0;
  const double c_s = cfg.coefficient * std::sqrt(dim_s);
  const double c_t = cfg.coefficient * std::sqrt(dim_t);
  return t_s * t_s * (std::sqrt(kl * kl + c_s * c_s) - c_s) +
         t_t * t_t * (std::sqrt(mse * mse + c_t * c_t) - c_t);
}

double correction(const seqflow::Logits& refined_logits,
                  const flowmatch::FrameSet& refined_frames,
                  const seqflow::Sequence& s1, const flowmatch::FrameSet& t1) {
  const auto n = t1.size();
  double ce = 0.0, trans = 0.0, rot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = softmax20(refined_logits, static_cast<int>(i));
    ce += -std::log(p[s1[i]]);
    trans += (refined_frames[i].translation - t1[i].translation).squaredNorm();
    const auto& ra = refined_frames[i].rotation.matrix();
    const auto& rb = t1[i].rotation.matrix();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        rot += (ra(r, c) - rb(r, c)) * (ra(r, c) - rb(r, c));
  }
  const double nn = static_cast<double>(n);
  return ce / nn + trans / nn + rot / nn;
}

double chi(const allatom::TorsionTable& pred,
           const allatom::TorsionTable& truth,
           std::span<const std::array<bool, 4>> pi_periodic) {
  double total = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t k = 0; k < 4; ++k) {
      if (!pred[i].defined[k]) continue;
      const double a = pred[i].chi[k];
      const double b = truth[i].chi[k];
      const auto gap = [](double x, double y) {
        const double ds = std::sin(x) - std::sin(y);
        const double dc = std::cos(x) - std::cos(y);
        return ds * ds + dc * dc;
      };
      double d = gap(a, b);
      if (pi_periodic[i][k]) d = std::min(d, gap(a, b + M_PI));
      total += d;
      ++count;
    }
  return count == 0 ? 0.0 : total / count;
}

std::vector<proteinio::InterfacePair> interface_pairs(
    const proteinio::Complex& c, double cutoff) {
  struct Entry {
    proteinio::ResidueRef ref;
    Vec3 pos;
  };
  std::vector<Entry> entries;
  for (int ci = 0; ci < static_cast<int>(c.chains.size()); ++ci) {
    const auto& chain = c.chains[static_cast<std::size_t>(ci)];
    for (int ri = 0; ri < chain.length(); ++ri) {
      Vec3 pos = chain.frames[static_cast<std::size_t>(ri)].translation;
      bool have_cb = false;
      for (const auto& a : chain.atoms[static_cast<std::size_t>(ri)]) {
        if (a.name == "CB") {
          pos = a.pos;
          have_cb = true;
          break;
        }
      }
      if (!have_cb) {
        for (const auto& a : chain.atoms[static_cast<std::size_t>(ri)])
          if (a.name == "CA") {
            pos = a.pos;
            break;
          }
      }
      entries.push_back({{ci, ri}, pos});
    }
  }
  std::vector<proteinio::InterfacePair> out;
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      if (entries[i].ref.chain == entries[j].ref.chain) continue;
      if ((entries[i].pos - entries[j].pos).norm() <= cutoff)
        out.push_back({entries[i].ref, entries[j].ref});
    }
  std::sort(out.begin(), out.end());
  return out;
}

double kabsch_grid_refine(std::span<const Vec3> a, std::span<const Vec3> b) {
  const auto n = a.size();
  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    ca += a[i];
    cb += b[i];
  }
  ca /= static_cast<double>(n);
  cb /= static_cast<double>(n);
  std::vector<Vec3> pa(n), pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = a[i] - ca;
    pb[i] = b[i] - cb;
  }

  const auto value = [&](const geom3::Mat3& r) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (r * pa[i] - pb[i]).squaredNorm();
    return std::sqrt(ss / static_cast<double>(n));
  };
  const auto rot_zyz = [](double al, double be, double ga) {
    auto rz = [](double t) {
      geom3::Mat3 m;
      m << std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t), 0, 0, 0, 1;
      return m;
    };
    auto ry = [](double t) {
      geom3::Mat3 m;
      m << std::cos(t), 0, std::sin(t), 0, 1, 0, -std::sin(t), 0, std::cos(t);
      return m;
    };
    return geom3::Mat3(rz(al) * ry(be) * rz(ga));
  };
  const auto axis_rot = [](int axis, double t) {
    Vec3 w = Vec3::Zero();
    w(axis) = t;
    geom3::Mat3 k;
    k << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
    const double th = std::abs(t);
    if (th < 1e-12) return geom3::Mat3(geom3::Mat3::Identity());
    return geom3::Mat3(geom3::Mat3::Identity() + std::sin(th) / th * k +
                       (1 - std::cos(th)) / (th * th) * (k * k));
  };

  // Coarse zyz grid.
  geom3::Mat3 best = geom3::Mat3::Identity();
  double best_val = value(best);
  const int na = 18, nb = 9;
  for (int i = 0; i < na; ++i)
    for (int j = 0; j <= nb; ++j)
      for (int k = 0; k < na; ++k) {
        const geom3::Mat3 r = rot_zyz(2 * M_PI * i / na, M_PI * j / nb,
                                      2 * M_PI * k / na);
        const double v = value(r);
        if (v < best_val) {
          best_val = v;
          best = r;
        }
      }

  // Greedy refinement with shrinking axis steps.
  double step = 2.0 * M_PI / na;
  while (step > 1e-8) {
    bool improved = false;
    for (int axis = 0; axis < 3; ++axis) {
      for (const double sgn : {1.0, -1.0}) {
        const geom3::Mat3 r = axis_rot(axis, sgn * step) * best;
        const double v = value(r);
        if (v < best_val - 1e-15) {
          best_val = v;
          best = r;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best_val;
}

}  // namespace atomflow::ref
