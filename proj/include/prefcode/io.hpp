#pragma once
// File formats. Preferences, codebook sets, and design results are JSON;
// joint preference matrices and sample exports are plain CSV; bitstreams are
// raw bytes. Serialization is deterministic (sorted keys, shortest-round-trip
// floats), so identical inputs produce byte-identical files.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "prefcode/design_continuous.hpp"
#include "prefcode/design_discrete.hpp"
#include "prefcode/design_twouser.hpp"
#include "prefcode/codec.hpp"
#include "prefcode/types.hpp"

namespace prefcode::io {

using nlohmann::json;

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- preferences -----------------------------------------------------------

inline void save_preference(const std::string& path, const DiscretePreference& pref) {
  json j;
  j["n"] = pref.alphabet_size();
  json spvs = json::array();
  for (std::size_t i = 0; i < pref.item_count(); ++i) spvs.push_back(pref.spv(i).probs());
  j["spvs"] = std::move(spvs);
  j["probs"] = pref.probs();
  write_text(path, j.dump(2) + "\n");
}

inline DiscretePreference load_preference(const std::string& path) {
  json j = json::parse(read_text(path));
  const auto n = j.at("n").get<std::size_t>();
  std::vector<Spv> spvs;
  for (const auto& row : j.at("spvs")) {
    auto v = row.get<std::vector<double>>();
    if (v.size() != n) throw DimensionMismatch("preference file: SPV length != n");
    spvs.emplace_back(std::move(v));
  }
  return DiscretePreference(std::move(spvs), j.at("probs").get<std::vector<double>>());
}

// --- codebook sets and design results --------------------------------------

inline void save_codebook_set(const std::string& path, const CodebookSet& set) {
  json j;
  j["n"] = set.alphabet_size();
  json books = json::array();
  for (const auto& cb : set.codebooks()) books.push_back(cb.q());
  j["codebooks"] = std::move(books);
  write_text(path, j.dump(2) + "\n");
}

inline CodebookSet load_codebook_set(const std::string& path) {
  json j = json::parse(read_text(path));
  const auto n = j.at("n").get<std::size_t>();
  std::vector<Codebook> books;
  for (const auto& row : j.at("codebooks")) {
    auto v = row.get<std::vector<double>>();
    if (v.size() != n) throw DimensionMismatch("codebook file: codebook length != n");
    books.emplace_back(std::move(v));
  }
  return CodebookSet(std::move(books));
}

inline void save_design(const std::string& path, std::size_t n, const DesignResult& result) {
  json j;
  j["n"] = n;
  j["k"] = result.set.size();
  json books = json::array();
  for (const auto& cb : result.set.codebooks()) books.push_back(cb.q());
  j["codebooks"] = std::move(books);
  j["assignment"] = result.assignment.owner;
  j["objective_bits_per_symbol"] = result.objective;
  j["iterations"] = result.iterations;
  write_text(path, j.dump(2) + "\n");
}

inline CodebookSet load_design_codebooks(const std::string& path) {
  json j = json::parse(read_text(path));
  std::vector<Codebook> books;
  for (const auto& row : j.at("codebooks")) books.emplace_back(row.get<std::vector<double>>());
  return CodebookSet(std::move(books));
}

inline void save_twouser_design(const std::string& path, std::size_t n,
                                const TwoUserDesign& design, double objective_bits) {
  json j;
  j["n"] = n;
  j["k0"] = design.common.size();
  auto dump_books = [](const std::vector<Codebook>& books) {
    json arr = json::array();
    for (const auto& cb : books) arr.push_back(cb.q());
    return arr;
  };
  j["common"] = dump_books(design.common);
  j["excl1"] = dump_books(design.excl1);
  j["excl2"] = dump_books(design.excl2);
  j["objective_bits"] = objective_bits;
  write_text(path, j.dump(2) + "\n");
}

inline TwoUserDesign load_twouser_design(const std::string& path) {
  json j = json::parse(read_text(path));
  TwoUserDesign d;
  auto read_books = [&](const char* key, std::vector<Codebook>& dst) {
    for (const auto& row : j.at(key)) dst.emplace_back(row.get<std::vector<double>>());
  };
  read_books("common", d.common);
  read_books("excl1", d.excl1);
  read_books("excl2", d.excl2);
  return d;
}

// --- preference specs -------------------------------------------------------

inline void save_preference_spec(const std::string& path, const PreferenceSpec& spec) {
  json j;
  j["n"] = spec.n;
  switch (spec.kind) {
    case PreferenceSpec::Kind::uniform:
      j["kind"] = "uniform";
      break;
    case PreferenceSpec::Kind::dirichlet:
      j["kind"] = "dirichlet";
      j["alpha"] = spec.alpha;
      break;
    case PreferenceSpec::Kind::radial:
      j["kind"] = "radial";
      j["center"] = spec.center;
      break;
    case PreferenceSpec::Kind::custom:
      throw std::invalid_argument("custom densities are code-only and cannot be saved");
  }
  write_text(path, j.dump(2) + "\n");
}

inline PreferenceSpec load_preference_spec(const std::string& path) {
  json j = json::parse(read_text(path));
  const auto kind = j.at("kind").get<std::string>();
  const auto n = j.at("n").get<std::size_t>();
  if (kind == "uniform") return PreferenceSpec::Uniform(n);
  if (kind == "dirichlet") return PreferenceSpec::Dirichlet(j.at("alpha").get<std::vector<double>>());
  if (kind == "radial") return PreferenceSpec::Radial(j.at("center").get<std::vector<double>>());
  throw std::invalid_argument("unknown preference kind: " + kind);
}

// --- joint preferences and samples ------------------------------------------

inline void save_joint_csv(const std::string& path, const JointPreference& F) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < F.item_count(); ++i) {
    for (std::size_t j = 0; j < F.item_count(); ++j) {
      if (j) out << ',';
      out << F(i, j);
    }
    out << '\n';
  }
  write_text(path, out.str());
}

inline JointPreference load_joint_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return JointPreference(std::move(rows));
}

inline void save_sample_csv(const std::string& path, const SampleSet& sample) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& p : sample.points) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) out << ',';
      out << p[i];
    }
    out << '\n';
  }
  write_text(path, out.str());
}

// --- items and bitstreams ----------------------------------------------------

/// Text mode: whitespace-separated symbol indices. Raw mode: every byte is a
/// symbol over the N = 256 alphabet.
inline ItemSpec load_item(const std::string& path, bool raw) {
  ItemSpec item;
  if (raw) {
    auto text = read_text(path);
    item.symbols.reserve(text.size());
    for (unsigned char c : text) item.symbols.push_back(c);
    return item;
  }
  std::istringstream in(read_text(path));
  long long v;
  while (in >> v) {
    if (v < 0) throw std::invalid_argument("negative symbol index in item file");
    item.symbols.push_back(static_cast<std::size_t>(v));
  }
  return item;
}

inline void save_item(const std::string& path, const ItemSpec& item, bool raw) {
  if (raw) {
    std::string bytes;
    bytes.reserve(item.symbols.size());
    for (std::size_t s : item.symbols) {
      if (s > 255) throw std::invalid_argument("symbol does not fit a raw byte");
      bytes.push_back(static_cast<char>(s));
    }
    write_text(path, bytes);
    return;
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < item.symbols.size(); ++i) {
    if (i) out << ' ';
    out << item.symbols[i];
  }
  out << '\n';
  write_text(path, out.str());
}

inline void save_bitstream(const std::string& path, const Bitstream& stream) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(stream.bytes.data()),
            static_cast<std::streamsize>(stream.bytes.size()));
}

inline Bitstream load_bitstream(const std::string& path) {
  auto text = read_text(path);
  Bitstream s;
  s.bytes.assign(text.begin(), text.end());
  return s;
}

}  // namespace prefcode::io
