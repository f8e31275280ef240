#include "atomflow/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace atomflow::metrics {

KabschResult kabsch_rmsd(std::span<const Vec3> a, std::span<const Vec3> b) {
  require(a.size() == b.size(), Errc::shape_mismatch,
          "kabsch_rmsd: length mismatch");
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  require(n >= 3, Errc::invalid_argument, "kabsch_rmsd: need >= 3 points");

  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    ca += a[i];
    cb += b[i];
  }
  ca /= static_cast<double>(n);
  cb /= static_cast<double>(n);

  geom3::Mat3 h = geom3::Mat3::Zero();
  double scale = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const Vec3 pa = a[i] - ca, pb = b[i] - cb;
    h += pa * pb.transpose();
    scale = std::max({scale, pa.norm(), pb.norm()});
  }

  Eigen::JacobiSVD<geom3::Mat3> svd(h, Eigen::ComputeFullU |
                                           Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  require(sv(1) > 1e-12 * std::max(1.0, scale * scale),
          Errc::degenerate_geometry,
          "kabsch_rmsd: rank-deficient configuration");
  geom3::Mat3 u = svd.matrixU();
  const geom3::Mat3 v = svd.matrixV();
  geom3::Mat3 r = v * u.transpose();
  if (r.determinant() < 0) {
    u.col(2) *= -1.0;
    r = v * u.transpose();
  }
  const geom3::Rotation rot = geom3::Rotation::from_matrix_unchecked(r);

  double ss = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i)
    ss += (rot * (a[i] - ca) - (b[i] - cb)).squaredNorm();
  KabschResult out;
  out.rmsd = std::sqrt(ss / static_cast<double>(n));
  out.transform = {rot, cb - rot * ca};
  return out;
}

double aar(const seqflow::Sequence& pred, const seqflow::Sequence& truth) {
  require(pred.size() == truth.size(), Errc::shape_mismatch,
          "aar: length mismatch");
  require(!pred.empty(), Errc::invalid_argument, "aar: empty sequences");
  int hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    require(pred[i] != seqflow::kMaskToken && truth[i] != seqflow::kMaskToken,
            Errc::invalid_argument, "aar: MASK token in input");
    if (pred[i] == truth[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

std::string ChiHistogram::to_text() const {
  std::ostringstream os;
  const double width = 2.0 * M_PI / bins;
  for (int aa = 0; aa < 20; ++aa) {
    const auto& tpl = allatom::residue_template(static_cast<seqflow::Token>(aa));
    for (int k = 0; k < tpl.chi_count(); ++k) {
      const auto& row = counts[static_cast<std::size_t>(aa)]
                              [static_cast<std::size_t>(k)];
      for (int bin = 0; bin < bins; ++bin) {
        os << tpl.name3 << '\t' << (k + 1) << '\t' << (bin * width) << '\t'
           << (row.empty() ? 0 : row[static_cast<std::size_t>(bin)]) << '\n';
      }
    }
  }
  return os.str();
}

void accumulate_chi_histogram(ChiHistogram& hist,
                              const proteinio::Complex& c) {
  const double width = 2.0 * M_PI / hist.bins;
  for (const auto& chain : c.chains) {
    for (int i = 0; i < chain.length(); ++i) {
      const auto aa = chain.seq[static_cast<std::size_t>(i)];
      if (aa >= seqflow::kNumAminoAcids) continue;
      const auto& row = chain.torsions[static_cast<std::size_t>(i)];
      for (std::size_t k = 0; k < 4; ++k) {
        if (!row.defined[k]) continue;
        auto& bins = hist.counts[aa][k];
        if (bins.empty())
          bins.assign(static_cast<std::size_t>(hist.bins), 0);
        const double a = allatom::wrap_angle_2pi(row.chi[k]);
        auto bin = static_cast<std::size_t>(a / width);
        if (bin >= static_cast<std::size_t>(hist.bins))
          bin = static_cast<std::size_t>(hist.bins) - 1;
        ++bins[bin];
        ++hist.total;
      }
    }
  }
}

ChiHistogram chi_histograms(std::span<const proteinio::Complex> dataset,
                            int bins) {
  require(bins >= 2, Errc::invalid_argument, "chi_histograms: bins < 2");
  ChiHistogram hist;
  hist.bins = bins;
  for (const auto& c : dataset) accumulate_chi_histogram(hist, c);
  return hist;
}

}  // namespace atomflow::metrics
