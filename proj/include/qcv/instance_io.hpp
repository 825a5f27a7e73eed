#pragma once

#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcv/analysis.hpp"
#include "qcv/hamiltonian.hpp"
#include "qcv/protocol.hpp"
#include "qcv/random.hpp"

namespace qcv {

using json = nlohmann::ordered_json;

// --------------------------------------------------------------------------
// Instance files. JSON, format_version 1:
//
//   {
//     "format_version": 1,
//     "n_qubits": 2,
//     "terms": [{"i": 1, "j": 2, "p": 1.0, "s": -1}],
//     "alpha": 0.1,            // optional
//     "beta": 0.6,             // optional
//     "promise_label": "yes"   // optional: yes | no | unknown
//   }
//
// parse(serialize(h)) == h holds field for field; validation is exactly
// hamiltonian validate(), nothing is repaired on the way in.

inline constexpr int kInstanceFormatVersion = 1;

struct ParseResult {
  std::optional<XZHamiltonian> ham;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty() && ham.has_value(); }
};

inline ParseResult parse_instance(const std::string& bytes) {
  ParseResult result;
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    result.errors.push_back(std::string("malformed JSON: ") + e.what());
    return result;
  }
  if (!doc.is_object()) {
    result.errors.push_back("top level must be a JSON object");
    return result;
  }
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer()) {
    result.errors.push_back("missing integer field 'format_version'");
    return result;
  }
  if (doc["format_version"].get<int>() != kInstanceFormatVersion) {
    result.errors.push_back("unsupported format_version " + doc["format_version"].dump());
    return result;
  }
  XZHamiltonian ham;
  if (!doc.contains("n_qubits") || !doc["n_qubits"].is_number_integer()) {
    result.errors.push_back("missing integer field 'n_qubits'");
    return result;
  }
  ham.n_qubits = doc["n_qubits"].get<int>();
  if (!doc.contains("terms") || !doc["terms"].is_array()) {
    result.errors.push_back("missing array field 'terms'");
    return result;
  }
  std::size_t idx = 0;
  for (const auto& t : doc["terms"]) {
    std::string where = "terms[" + std::to_string(idx) + "]";
    if (!t.is_object() || !t.contains("i") || !t.contains("j") || !t.contains("p") ||
        !t.contains("s")) {
      result.errors.push_back(where + ": each term needs fields i, j, p, s");
      return result;
    }
    if (!t["i"].is_number_integer() || !t["j"].is_number_integer() || !t["p"].is_number() ||
        !t["s"].is_number_integer()) {
      result.errors.push_back(where + ": fields i, j, s are integers and p is a number");
      return result;
    }
    ham.terms.push_back(XZTerm{t["i"].get<int>(), t["j"].get<int>(), t["p"].get<double>(),
                               t["s"].get<int>()});
    ++idx;
  }
  if (doc.contains("alpha") && !doc["alpha"].is_null()) {
    if (!doc["alpha"].is_number()) {
      result.errors.push_back("'alpha' must be a number");
      return result;
    }
    ham.alpha = doc["alpha"].get<double>();
  }
  if (doc.contains("beta") && !doc["beta"].is_null()) {
    if (!doc["beta"].is_number()) {
      result.errors.push_back("'beta' must be a number");
      return result;
    }
    ham.beta = doc["beta"].get<double>();
  }
  if (doc.contains("promise_label")) {
    std::string label = doc["promise_label"].get<std::string>();
    if (label == "yes")
      ham.promise_label = PromiseLabel::yes;
    else if (label == "no")
      ham.promise_label = PromiseLabel::no;
    else if (label == "unknown")
      ham.promise_label = PromiseLabel::unknown;
    else {
      result.errors.push_back("'promise_label' must be yes, no, or unknown");
      return result;
    }
  }
  result.errors = validate(ham);
  if (result.errors.empty()) result.ham = std::move(ham);
  return result;
}

inline std::string serialize_instance(const XZHamiltonian& ham) {
  json doc;
  doc["format_version"] = kInstanceFormatVersion;
  doc["n_qubits"] = ham.n_qubits;
  doc["terms"] = json::array();
  for (const XZTerm& t : ham.terms)
    doc["terms"].push_back(json{{"i", t.i}, {"j", t.j}, {"p", t.p}, {"s", t.s}});
  if (ham.alpha) doc["alpha"] = *ham.alpha;
  if (ham.beta) doc["beta"] = *ham.beta;
  doc["promise_label"] = to_string(ham.promise_label);
  return doc.dump(2) + "\n";
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// --------------------------------------------------------------------------
// Named presets and random valid instances.

// Single-term two-qubit instance; ground state is a Bell state, ground
// energy 0. sign = -1 is the H_Bell workhorse (ground state |Phi+>).
inline XZHamiltonian bell_instance(int sign = -1) {
  XZHamiltonian ham;
  ham.n_qubits = 2;
  ham.terms.push_back(XZTerm{1, 2, 1.0, sign});
  ham.alpha = 0.1;
  ham.beta = 0.6;
  ham.promise_label = PromiseLabel::yes;
  return ham;
}

// Frustrated three-qubit triangle: no state satisfies all three terms, so
// the ground energy is strictly positive. Useful as a perturbed instance.
inline XZHamiltonian triangle_instance() {
  XZHamiltonian ham;
  ham.n_qubits = 3;
  ham.terms.push_back(XZTerm{1, 2, 1.0 / 3.0, -1});
  ham.terms.push_back(XZTerm{1, 3, 1.0 / 3.0, -1});
  ham.terms.push_back(XZTerm{2, 3, 1.0 / 3.0, 1});
  ham.promise_label = PromiseLabel::unknown;
  return ham;
}

inline std::optional<XZHamiltonian> preset_instance(const std::string& name) {
  if (name == "bell") return bell_instance(-1);
  if (name == "bell-plus") return bell_instance(+1);
  if (name == "triangle") return triangle_instance();
  return std::nullopt;
}

// Random valid instance: n_terms distinct pairs, Dirichlet-uniform weights
// (normalized exactly), uniform signs. alpha/beta are left unset.
inline XZHamiltonian random_instance(int n, int n_terms, RandomSource& rng) {
  auto pairs = all_pairs(n);
  if (n_terms < 1 || n_terms > static_cast<int>(pairs.size()))
    throw std::invalid_argument("random_instance: n_terms must be in 1..C(N,2)");
  // partial Fisher-Yates over the pair list
  for (int k = 0; k < n_terms; ++k) {
    std::size_t pick = k + rng.index(pairs.size() - k);
    std::swap(pairs[k], pairs[pick]);
  }
  std::vector<double> weights(n_terms);
  double sum = 0.0;
  for (double& w : weights) {
    double u = rng.real01();
    while (u <= 0.0) u = rng.real01();
    w = -std::log(u);
    sum += w;
  }
  XZHamiltonian ham;
  ham.n_qubits = n;
  for (int k = 0; k < n_terms; ++k)
    ham.terms.push_back(
        XZTerm{pairs[k].first, pairs[k].second, weights[k] / sum, rng.bit() ? 1 : -1});
  return ham;
}

// --------------------------------------------------------------------------
// Transcripts: one JSON record per line. ZK records carry the revealed pair.

inline std::string transcript_line(const TrialRecord& rec) {
  json doc;
  doc["variant"] = to_string(rec.variant);
  doc["h"] = rec.key.h;
  doc["m"] = rec.key.m;
  if (rec.key.zk_pair) {
    doc["a"] = rec.key.zk_pair->first;
    doc["b"] = rec.key.zk_pair->second;
  }
  doc["x"] = rec.answer.x;
  doc["z"] = rec.answer.z;
  doc["check"] = json::array({rec.check_pair.first, rec.check_pair.second});
  doc["corrected"] = json::array({rec.corrected[0], rec.corrected[1]});
  doc["verdict"] = to_string(rec.verdict);
  return doc.dump();
}

inline TrialRecord parse_transcript_line(const std::string& line) {
  json doc = json::parse(line);
  TrialRecord rec;
  auto variant = variant_from_string(doc.at("variant").get<std::string>());
  if (!variant) throw std::invalid_argument("transcript: unknown variant");
  rec.variant = *variant;
  rec.key.h = doc.at("h").get<int>();
  rec.key.m = doc.at("m").get<std::vector<int>>();
  if (doc.contains("a")) rec.key.zk_pair = std::make_pair(doc.at("a").get<int>(), doc.at("b").get<int>());
  rec.answer.x = doc.at("x").get<std::vector<int>>();
  rec.answer.z = doc.at("z").get<std::vector<int>>();
  rec.check_pair = {doc.at("check")[0].get<int>(), doc.at("check")[1].get<int>()};
  rec.corrected = {doc.at("corrected")[0].get<int>(), doc.at("corrected")[1].get<int>()};
  rec.verdict = doc.at("verdict").get<std::string>() == "accept" ? Verdict::accept : Verdict::reject;
  return rec;
}

inline json estimate_json(const Estimate& est) {
  return json{{"mean", est.mean},
              {"trials", est.trials},
              {"ci95_halfwidth", est.ci95_halfwidth},
              {"seed", est.seed}};
}

}  // namespace qcv
