#include "atomflow/allatom.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace atomflow::allatom {

namespace detail {
const char* embedded_residue_templates();  // generated from data/
}

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegenerateTol = 1e-10;

double deg2rad(double d) { return d * kPi / 180.0; }

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<ResidueTemplate> parse_templates(const char* text) {
  std::vector<ResidueTemplate> out;
  std::istringstream is(text);
  std::string line;
  ResidueTemplate cur;
  bool in_block = false;
  int lineno = 0;
  auto bad = [&](const std::string& what) {
    fail(Errc::parse, "residue template table, line " +
                          std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "residue") {
      if (in_block || tok.size() != 3 || tok[2].size() != 1)
        bad("malformed residue header");
      cur = ResidueTemplate{};
      cur.name3 = tok[1];
      cur.code1 = tok[2][0];
      in_block = true;
    } else if (tok[0] == "root") {
      if (!in_block || tok.size() != 6) bad("malformed root record");
      cur.roots.emplace_back(
          tok[1], Vec3(std::stod(tok[3]), std::stod(tok[4]), std::stod(tok[5])));
    } else if (tok[0] == "atom") {
      // atom NAME ELEM group G ref A B C bond L angle A tor {fixed V | chi K OFF}
      if (!in_block || tok.size() < 15 || tok[3] != "group" || tok[5] != "ref" ||
          tok[9] != "bond" || tok[11] != "angle" || tok[13] != "tor")
        bad("malformed atom record");
      AtomSpec spec;
      spec.name = tok[1];
      spec.element = tok[2][0];
      spec.group = std::stoi(tok[4]);
      spec.ref = {tok[6], tok[7], tok[8]};
      spec.bond_length = std::stod(tok[10]);
      spec.bond_angle = deg2rad(std::stod(tok[12]));
      if (tok[14] == "fixed") {
        if (tok.size() != 16) bad("fixed torsion needs one value");
        spec.chi_driven = false;
        spec.chi_index = 0;
        spec.torsion = deg2rad(std::stod(tok[15]));
      } else if (tok[14] == "chi") {
        if (tok.size() != 17) bad("chi torsion needs index and offset");
        spec.chi_driven = true;
        spec.chi_index = std::stoi(tok[15]);
        spec.torsion = deg2rad(std::stod(tok[16]));
      } else {
        bad("unknown torsion kind");
      }
      cur.atoms.push_back(std::move(spec));
    } else if (tok[0] == "chi") {
      if (!in_block || tok.size() < 6 || tok.size() > 7)
        bad("malformed chi record");
      if (tok.size() == 7 && tok[6] != "periodic") bad("bad chi suffix");
      const int k = std::stoi(tok[1]);
      if (k != static_cast<int>(cur.chis.size()) + 1) bad("chi out of order");
      ChiSpec chi;
      chi.atoms = {tok[2], tok[3], tok[4], tok[5]};
      chi.pi_periodic = tok.size() == 7;
      cur.chis.push_back(std::move(chi));
    } else if (tok[0] == "end") {
      if (!in_block) bad("end outside block");
      for (const auto& chi : cur.chis)
        for (const auto& a : chi.atoms)
          if (!cur.has_atom(a)) bad(cur.name3 + ": chi atom " + a + " unknown");
      out.push_back(std::move(cur));
      in_block = false;
    } else {
      bad("unknown record " + tok[0]);
    }
  }
  if (in_block) fail(Errc::parse, "residue template table: unterminated block");
  return out;
}

const std::vector<ResidueTemplate>& templates() {
  static const std::vector<ResidueTemplate> t =
      parse_templates(detail::embedded_residue_templates());
  return t;
}

const Vec3* find_atom(std::span<const AtomRecord> atoms,
                      std::string_view name) {
  for (const auto& a : atoms)
    if (a.name == name) return &a.pos;
  return nullptr;
}

}  // namespace

bool ResidueTemplate::has_atom(std::string_view name) const {
  for (const auto& [n, p] : roots)
    if (n == name) return true;
  for (const auto& a : atoms)
    if (a.name == name) return true;
  return false;
}

const ResidueTemplate& residue_template(seqflow::Token aa) {
  require(aa < seqflow::kNumAminoAcids, Errc::invalid_argument,
          "residue_template: not an amino-acid token");
  const auto& all = templates();
  const auto name3 = seqflow::token_to_name3(aa);
  for (const auto& t : all)
    if (t.name3 == name3) return t;
  fail(Errc::parse, "residue template table missing " + std::string(name3));
}

const ResidueTemplate* find_residue_template(std::string_view name3) {
  for (const auto& t : templates())
    if (t.name3 == name3) return &t;
  return nullptr;
}

double wrap_angle_2pi(double a) {
  double w = std::fmod(a, 2.0 * kPi);
  if (w < 0) w += 2.0 * kPi;
  if (w >= 2.0 * kPi) w = 0.0;
  return w;
}

double dihedral(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                const Vec3& p4) {
  const Vec3 b1 = p2 - p1, b2 = p3 - p2, b3 = p4 - p3;
  const Vec3 n1 = b1.cross(b2), n2 = b2.cross(b3);
  require(b2.norm() > kDegenerateTol && n1.norm() > kDegenerateTol &&
              n2.norm() > kDegenerateTol,
          Errc::degenerate_geometry, "dihedral: degenerate point set");
  const Vec3 b2h = b2.normalized();
  const double x = n1.dot(n2);
  const double y = n1.cross(n2).dot(b2h);
  return wrap_angle_2pi(std::atan2(y, x));
}

Vec3 nerf_place(const Vec3& a, const Vec3& b, const Vec3& c, double bond,
                double angle, double torsion) {
  const Vec3 bc = c - b;
  require(bc.norm() > kDegenerateTol, Errc::degenerate_geometry,
          "nerf_place: coincident reference atoms");
  const Vec3 x_hat = bc.normalized();
  const Vec3 u = b - a;
  const Vec3 u_perp = u - u.dot(x_hat) * x_hat;
  require(u_perp.norm() > kDegenerateTol, Errc::degenerate_geometry,
          "nerf_place: collinear reference atoms");
  const Vec3 y_hat = u_perp.normalized();
  const Vec3 z_hat = x_hat.cross(y_hat);
  return c + bond * (-std::cos(angle) * x_hat -
                     std::sin(angle) * std::cos(torsion) * y_hat -
                     std::sin(angle) * std::sin(torsion) * z_hat);
}

RigidTransform frames_from_backbone(const Vec3& n, const Vec3& ca,
                                    const Vec3& c) {
  require(n.allFinite() && ca.allFinite() && c.allFinite(),
          Errc::invalid_argument, "frames_from_backbone: non-finite input");
  const Vec3 v1 = c - ca;
  require(v1.norm() > kDegenerateTol, Errc::degenerate_geometry,
          "frames_from_backbone: C coincides with CA");
  const Vec3 e1 = v1.normalized();
  const Vec3 v2 = n - ca;
  const Vec3 u2 = v2 - v2.dot(e1) * e1;
  require(u2.norm() > kDegenerateTol * std::max(1.0, v2.norm()),
          Errc::degenerate_geometry,
          "frames_from_backbone: collinear backbone atoms");
  const Vec3 e2 = u2.normalized();
  const Vec3 e3 = e1.cross(e2);
  geom3::Mat3 m;
  m.col(0) = e1;
  m.col(1) = e2;
  m.col(2) = e3;
  return {geom3::Rotation::from_matrix_unchecked(m), ca};
}

namespace {

ChiRow extract_impl(std::span<const AtomRecord> atoms, seqflow::Token aa,
                    bool strict, int* missing_chis) {
  const auto& tpl = residue_template(aa);
  ChiRow row;
  if (missing_chis) *missing_chis = 0;
  for (int k = 0; k < tpl.chi_count(); ++k) {
    const auto& quad = tpl.chis[static_cast<std::size_t>(k)].atoms;
    const Vec3* p[4];
    bool ok = true;
    for (int j = 0; j < 4; ++j) {
      p[j] = find_atom(atoms, quad[static_cast<std::size_t>(j)]);
      if (!p[j]) {
        if (strict)
          fail(Errc::missing_atom, tpl.name3 + ": missing atom " +
                                       quad[static_cast<std::size_t>(j)]);
        ok = false;
        break;
      }
    }
    if (!ok) {
      if (missing_chis) ++*missing_chis;
      continue;
    }
    row.chi[static_cast<std::size_t>(k)] = dihedral(*p[0], *p[1], *p[2], *p[3]);
    row.defined[static_cast<std::size_t>(k)] = true;
  }
  return row;
}

}  // namespace

ChiRow extract_torsions(std::span<const AtomRecord> atoms, seqflow::Token aa) {
  return extract_impl(atoms, aa, /*strict=*/true, nullptr);
}

ChiRow extract_torsions_partial(std::span<const AtomRecord> atoms,
                                seqflow::Token aa, int* missing_chis) {
  return extract_impl(atoms, aa, /*strict=*/false, missing_chis);
}

BuiltResidue build_sidechain(seqflow::Token aa, const RigidTransform& frame,
                             const ChiRow& chi) {
  const auto& tpl = residue_template(aa);
  for (int k = 0; k < tpl.chi_count(); ++k)
    require(chi.defined[static_cast<std::size_t>(k)], Errc::invalid_argument,
            tpl.name3 + ": chi" + std::to_string(k + 1) + " undefined");

  std::map<std::string, Vec3, std::less<>> pos;
  for (const auto& [name, p] : tpl.roots) pos[name] = p;
  for (const auto& spec : tpl.atoms) {
    const Vec3& a = pos.at(spec.ref[0]);
    const Vec3& b = pos.at(spec.ref[1]);
    const Vec3& c = pos.at(spec.ref[2]);
    const double tor =
        spec.chi_driven
            ? wrap_angle_2pi(
                  chi.chi[static_cast<std::size_t>(spec.chi_index - 1)] +
                  spec.torsion)
            : spec.torsion;
    pos[spec.name] = nerf_place(a, b, c, spec.bond_length, spec.bond_angle, tor);
  }

  BuiltResidue out;
  auto emit = [&](const std::string& name, char elem) {
    AtomRecord rec;
    rec.name = name;
    rec.element = elem;
    rec.pos = frame.apply(pos.at(name));
    out.atoms.push_back(std::move(rec));
  };
  for (const auto& [name, p] : tpl.roots) emit(name, name[0]);
  for (const auto& spec : tpl.atoms) emit(spec.name, spec.element);

  out.group_frames.push_back(frame);  // backbone group
  for (const auto& cspec : tpl.chis) {
    const Vec3& b = pos.at(cspec.atoms[1]);
    const Vec3& c = pos.at(cspec.atoms[2]);
    const Vec3& d = pos.at(cspec.atoms[3]);
    out.group_frames.push_back(frame.compose(frames_from_backbone(b, c, d)));
  }
  return out;
}

ChiRow canonicalize_chi(seqflow::Token aa, const ChiRow& chi) {
  const auto& tpl = residue_template(aa);
  ChiRow out = chi;
  for (int k = 0; k < 4; ++k) {
    if (!out.defined[static_cast<std::size_t>(k)]) continue;
    double a = wrap_angle_2pi(out.chi[static_cast<std::size_t>(k)]);
    if (k < tpl.chi_count() &&
        tpl.chis[static_cast<std::size_t>(k)].pi_periodic && a >= kPi)
      a -= kPi;
    out.chi[static_cast<std::size_t>(k)] = a;
  }
  return out;
}

}  // namespace atomflow::allatom
