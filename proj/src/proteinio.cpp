#include "atomflow/proteinio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

namespace atomflow::proteinio {

int Complex::total_residues() const {
  int n = 0;
  for (const auto& ch : chains) n += ch.length();
  return n;
}

bool Complex::has_plddt() const {
  for (const auto& ch : chains)
    if (!ch.plddt.empty()) return true;
  return false;
}

double Complex::mean_plddt() const {
  double sum = 0.0;
  int n = 0;
  for (const auto& ch : chains)
    for (double v : ch.plddt) {
      sum += v;
      ++n;
    }
  return n == 0 ? 0.0 : sum / n;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string_view field(std::string_view line, std::size_t begin,
                       std::size_t len) {
  if (begin >= line.size()) return {};
  return line.substr(begin, std::min(len, line.size() - begin));
}

double parse_coord(std::string_view line, std::size_t begin, int lineno) {
  const std::string s = trim(field(line, begin, 8));
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    fail(Errc::parse,
         "PDB line " + std::to_string(lineno) + ": bad coordinate field");
  }
}

struct RawAtom {
  std::string name;
  char element;
  geom3::Vec3 pos;
  double bfactor;
  bool has_bfactor;
};

struct RawResidue {
  std::string resname;
  int resseq;
  char icode;
  std::vector<RawAtom> atoms;
  const RawAtom* find(std::string_view name) const {
    for (const auto& a : atoms)
      if (a.name == name) return &a;
    return nullptr;
  }
};

struct RawChain {
  std::string id;
  std::vector<RawResidue> residues;
};

}  // namespace

ParseResult parse_pdb(std::string_view text, std::string source_id) {
  std::vector<RawChain> raw;
  std::vector<ParseWarning> warnings;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  int model_count = 0;
  bool open_chain = false;  // TER closes the current chain

  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view rec = field(line, 0, 6);
    if (rec.starts_with("MODEL")) {
      ++model_count;
      if (model_count > 1) break;  // first model only
      continue;
    }
    if (rec.starts_with("ENDMDL")) break;
    if (rec.starts_with("TER")) {
      open_chain = false;
      continue;
    }
    if (rec.starts_with("END")) break;
    if (!rec.starts_with("ATOM")) continue;  // HETATM and headers ignored

    if (line.size() < 54)
      fail(Errc::parse,
           "PDB line " + std::to_string(lineno) + ": truncated ATOM record");
    const char altloc = line[16];
    if (altloc != ' ' && altloc != 'A') continue;

    RawAtom atom;
    atom.name = trim(field(line, 12, 4));
    atom.pos = geom3::Vec3(parse_coord(line, 30, lineno),
                           parse_coord(line, 38, lineno),
                           parse_coord(line, 46, lineno));
    const std::string bf = trim(field(line, 60, 6));
    atom.has_bfactor = !bf.empty();
    atom.bfactor = 0.0;
    if (atom.has_bfactor) {
      try {
        atom.bfactor = std::stod(bf);
      } catch (const std::exception&) {
        fail(Errc::parse,
             "PDB line " + std::to_string(lineno) + ": bad B-factor field");
      }
    }
    const std::string elem = trim(field(line, 76, 2));
    atom.element = elem.empty() ? atom.name[0] : elem[0];

    const std::string resname = trim(field(line, 17, 3));
    const std::string chain_id(1, line[21]);
    int resseq = 0;
    try {
      resseq = std::stoi(trim(field(line, 22, 4)));
    } catch (const std::exception&) {
      fail(Errc::parse,
           "PDB line " + std::to_string(lineno) + ": bad residue number");
    }
    const char icode = line.size() > 26 ? line[26] : ' ';

    if (!open_chain || raw.empty() || raw.back().id != chain_id) {
      raw.push_back(RawChain{chain_id, {}});
      open_chain = true;
    }
    auto& chain = raw.back();
    if (chain.residues.empty() || chain.residues.back().resseq != resseq ||
        chain.residues.back().icode != icode ||
        chain.residues.back().resname != resname) {
      chain.residues.push_back(RawResidue{resname, resseq, icode, {}});
    }
    chain.residues.back().atoms.push_back(std::move(atom));
  }

  Complex out;
  out.source_id = std::move(source_id);
  for (const auto& rc : raw) {
    bool standard = true;
    for (const auto& rr : rc.residues) {
      if (!allatom::find_residue_template(rr.resname)) {
        warnings.push_back(
            {0, "chain " + rc.id + " dropped: non-standard residue " +
                    rr.resname});
        standard = false;
        break;
      }
    }
    if (!standard) continue;

    Chain chain;
    chain.id = rc.id;
    bool any_bfactor = false;
    std::vector<double> plddt;
    for (const auto& rr : rc.residues) {
      const RawAtom* n = rr.find("N");
      const RawAtom* ca = rr.find("CA");
      const RawAtom* c = rr.find("C");
      if (!n || !ca || !c) {
        warnings.push_back(
            {0, "chain " + rc.id + " residue " + std::to_string(rr.resseq) +
                    " dropped: incomplete backbone"});
        continue;
      }
      const auto aa = seqflow::token_from_name3(rr.resname);
      const int ridx = chain.length();
      chain.seq.push_back(*aa);
      chain.frames.push_back(
          allatom::frames_from_backbone(n->pos, ca->pos, c->pos));
      std::vector<AtomRecord> atoms;
      atoms.reserve(rr.atoms.size());
      for (const auto& a : rr.atoms) {
        AtomRecord rec;
        rec.name = a.name;
        rec.element = a.element;
        rec.pos = a.pos;
        rec.residue_index = ridx;
        rec.chain_id = chain.id;
        atoms.push_back(std::move(rec));
      }
      chain.torsions.push_back(
          allatom::extract_torsions_partial(atoms, *aa, nullptr));
      chain.atoms.push_back(std::move(atoms));
      chain.resseq.push_back(rr.resseq);
      if (ca->has_bfactor && ca->bfactor != 0.0) any_bfactor = true;
      plddt.push_back(ca->bfactor);
    }
    if (chain.length() == 0) continue;
    if (any_bfactor) chain.plddt = std::move(plddt);
    out.chains.push_back(std::move(chain));
  }

  require(!out.chains.empty(), Errc::empty_complex,
          "PDB input yields no valid chains");
  return {std::move(out), std::move(warnings)};
}

std::string write_pdb(const Complex& c) {
  std::string out;
  out.reserve(static_cast<std::size_t>(c.total_residues()) * 400);
  char buf[96];
  int serial = 1;
  for (const auto& chain : c.chains) {
    const char cid = chain.id.empty() ? 'A' : chain.id[0];
    int last_resseq = 1;
    std::string last_resname = "GLY";
    for (int i = 0; i < chain.length(); ++i) {
      const int resseq =
          i < static_cast<int>(chain.resseq.size()) ? chain.resseq[i] : i + 1;
      const std::string resname(
          seqflow::token_to_name3(chain.seq[static_cast<std::size_t>(i)]));
      const double bf = i < static_cast<int>(chain.plddt.size())
                            ? chain.plddt[static_cast<std::size_t>(i)]
                            : 0.0;
      for (const auto& atom : chain.atoms[static_cast<std::size_t>(i)]) {
        std::string name4;
        if (atom.name.size() >= 4)
          name4 = atom.name.substr(0, 4);
        else
          name4 = " " + atom.name + std::string(3 - atom.name.size(), ' ');
        std::snprintf(buf, sizeof buf,
                      "ATOM  %5d %s %-3s %c%4d    %8.3f%8.3f%8.3f%6.2f%6.2f"
                      "          %2c\n",
                      serial++, name4.c_str(), resname.c_str(), cid, resseq,
                      atom.pos.x(), atom.pos.y(), atom.pos.z(), 1.0, bf,
                      atom.element);
        out += buf;
      }
      last_resseq = resseq;
      last_resname = resname;
    }
    std::snprintf(buf, sizeof buf, "TER   %5d      %-3s %c%4d\n", serial++,
                  last_resname.c_str(), cid, last_resseq);
    out += buf;
  }
  out += "END\n";
  return out;
}

SourceTag source_tag_from_string(std::string_view s) {
  if (s == "pdb-multichain") return SourceTag::PdbMultichain;
  if (s == "swissprot") return SourceTag::Swissprot;
  if (s == "afdb") return SourceTag::Afdb;
  if (s == "pdb-singlechain") return SourceTag::PdbSinglechain;
  fail(Errc::invalid_argument, "unknown source tag: " + std::string(s));
}

std::string_view to_string(SourceTag tag) {
  switch (tag) {
    case SourceTag::PdbMultichain: return "pdb-multichain";
    case SourceTag::Swissprot: return "swissprot";
    case SourceTag::Afdb: return "afdb";
    case SourceTag::PdbSinglechain: return "pdb-singlechain";
  }
  return "?";
}

std::vector<CurationVerdict> curate(const std::vector<CurationInput>& items,
                                    const CurationPolicy& policy) {
  std::vector<CurationVerdict> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    const Complex& c = *item.complex;
    CurationVerdict v{c.source_id, true, ""};
    auto drop = [&](std::string reason) {
      v.kept = false;
      v.reason = std::move(reason);
    };
    if (item.tag == SourceTag::PdbMultichain) {
      for (const auto& ch : c.chains)
        if (ch.length() < policy.min_chain_len) {
          drop("peptide-chain");
          break;
        }
    }
    if (v.kept && c.total_residues() > policy.max_total_len) drop("too-long");
    // cluster ids are a multi-chain PDB artifact; the other sources have none
    if (v.kept && policy.require_cluster_id &&
        item.tag == SourceTag::PdbMultichain && !c.cluster_id)
      drop("missing-cluster-id");
    if (v.kept && item.tag == SourceTag::Swissprot &&
        c.mean_plddt() <= policy.swissprot_plddt)
      drop("low-plddt");
    if (v.kept && item.tag == SourceTag::Afdb &&
        c.mean_plddt() <= policy.afdb_plddt)
      drop("low-plddt");
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

// CB when present, else CA (glycine and partial residues).
geom3::Vec3 contact_atom(const Chain& chain, int i) {
  const auto& atoms = chain.atoms[static_cast<std::size_t>(i)];
  for (const auto& a : atoms)
    if (a.name == "CB") return a.pos;
  for (const auto& a : atoms)
    if (a.name == "CA") return a.pos;
  return chain.frames[static_cast<std::size_t>(i)].translation;
}

}  // namespace

std::vector<InterfacePair> find_interface_pairs(const Complex& c,
                                                double cutoff) {
  require(c.chains.size() >= 2, Errc::no_interface,
          "find_interface_pairs: single-chain input");
  struct Entry {
    ResidueRef ref;
    geom3::Vec3 pos;
  };
  std::vector<Entry> entries;
  for (int ci = 0; ci < static_cast<int>(c.chains.size()); ++ci)
    for (int ri = 0; ri < c.chains[static_cast<std::size_t>(ci)].length(); ++ri)
      entries.push_back(
          {{ci, ri}, contact_atom(c.chains[static_cast<std::size_t>(ci)], ri)});

  const auto n = static_cast<std::ptrdiff_t>(entries.size());
  std::vector<std::vector<InterfacePair>> found(
      static_cast<std::size_t>(std::max<std::ptrdiff_t>(n, 1)));
  const double cutoff2 = cutoff * cutoff;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& local = found[static_cast<std::size_t>(i)];
    for (std::ptrdiff_t j = i + 1; j < n; ++j) {
      if (entries[i].ref.chain == entries[j].ref.chain) continue;
      if ((entries[i].pos - entries[j].pos).squaredNorm() <= cutoff2)
        local.push_back({entries[i].ref, entries[j].ref});
    }
  }
  std::vector<InterfacePair> out;
  for (const auto& local : found)
    out.insert(out.end(), local.begin(), local.end());
  return out;  // already lexicographic: i ascending, j ascending
}

CropResult crop_interface(const Complex& c, const CropSpec& spec, Rng& rng) {
  require(spec.max_residues >= 1 && spec.interface_cutoff > 0.0, Errc::config,
          "crop_interface: bad spec");
  const int total = c.total_residues();
  if (total <= spec.max_residues) return {c, false, {}};

  const auto pairs = find_interface_pairs(c, spec.interface_cutoff);
  require(!pairs.empty(), Errc::no_interface,
          "crop_interface: no interface pair within cutoff");
  const auto& sel =
      pairs[static_cast<std::size_t>(rng.uniform_int(
          0, static_cast<int>(pairs.size()) - 1))];

  auto ca_of = [&](const ResidueRef& r) {
    return c.chains[static_cast<std::size_t>(r.chain)]
        .frames[static_cast<std::size_t>(r.residue)]
        .translation;
  };
  const geom3::Vec3 mid = 0.5 * (ca_of(sel.a) + ca_of(sel.b));

  struct Ranked {
    double dist;
    int global;
    int chain, residue;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(static_cast<std::size_t>(total));
  int global = 0;
  for (int ci = 0; ci < static_cast<int>(c.chains.size()); ++ci)
    for (int ri = 0; ri < c.chains[static_cast<std::size_t>(ci)].length();
         ++ri, ++global)
      ranked.push_back(
          {(ca_of({ci, ri}) - mid).norm(), global, ci, ri});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.global < b.global;
  });

  std::vector<std::vector<bool>> keep(c.chains.size());
  for (std::size_t ci = 0; ci < c.chains.size(); ++ci)
    keep[ci].assign(static_cast<std::size_t>(c.chains[ci].length()), false);
  for (int k = 0; k < spec.max_residues; ++k)
    keep[static_cast<std::size_t>(ranked[static_cast<std::size_t>(k)].chain)]
        [static_cast<std::size_t>(ranked[static_cast<std::size_t>(k)].residue)] =
            true;

  Complex out;
  out.source_id = c.source_id;
  out.cluster_id = c.cluster_id;
  for (const auto& ch : c.chains) {
    std::string s;
    for (const auto t : ch.seq) s += seqflow::token_to_char(t);
    out.parent_sequences.push_back(std::move(s));
  }
  for (std::size_t ci = 0; ci < c.chains.size(); ++ci) {
    const auto& src = c.chains[ci];
    Chain dst;
    dst.id = src.id;
    for (int ri = 0; ri < src.length(); ++ri) {
      if (!keep[ci][static_cast<std::size_t>(ri)]) continue;
      const auto r = static_cast<std::size_t>(ri);
      const int new_index = dst.length();
      dst.seq.push_back(src.seq[r]);
      dst.frames.push_back(src.frames[r]);
      dst.torsions.push_back(src.torsions[r]);
      auto atoms = src.atoms[r];
      for (auto& a : atoms) a.residue_index = new_index;
      dst.atoms.push_back(std::move(atoms));
      if (r < src.resseq.size()) dst.resseq.push_back(src.resseq[r]);
      if (r < src.plddt.size()) dst.plddt.push_back(src.plddt[r]);
    }
    if (dst.length() > 0) out.chains.push_back(std::move(dst));
  }
  return {std::move(out), true, sel};
}

Chain build_chain(const std::string& id, const Sequence& seq,
                  const FrameSet& frames, const TorsionTable& torsions) {
  require(seq.size() == frames.size() && seq.size() == torsions.size(),
          Errc::shape_mismatch, "build_chain: length mismatch");
  Chain chain;
  chain.id = id;
  chain.seq = seq;
  chain.frames = frames;
  chain.torsions = torsions;
  for (auto& row : chain.torsions)
    for (std::size_t k = 0; k < 4; ++k)
      if (row.defined[k]) row.chi[k] = allatom::wrap_angle_2pi(row.chi[k]);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    require(seq[i] != seqflow::kMaskToken, Errc::invalid_argument,
            "build_chain: masked residue");
    auto built = allatom::build_sidechain(seq[i], frames[i], chain.torsions[i]);
    for (auto& a : built.atoms) {
      a.residue_index = static_cast<int>(i);
      a.chain_id = id;
    }
    chain.atoms.push_back(std::move(built.atoms));
    chain.resseq.push_back(static_cast<int>(i) + 1);
  }
  return chain;
}

}  // namespace atomflow::proteinio
