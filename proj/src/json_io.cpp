#include "k3hiso/json_io.hpp"

#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace k3h {

using ordered_json = nlohmann::ordered_json;

std::string decomposition_to_json(const Decomposition& d, int indent) {
  ordered_json j;
  j["schema_version"] = kJsonSchemaVersion;
  j["h"] = d.h;
  j["root"] = d.root;
  ordered_json nodes = ordered_json::array();
  for (std::size_t t = 0; t < d.nodes.size(); ++t) {
    const auto& n = d.nodes[t];
    ordered_json nj;
    nj["id"] = t;
    nj["parent"] = n.parent;
    nj["depth"] = n.depth;
    nj["bag"] = n.bag;
    nj["gamma"] = n.anchors;
    nj["adhesion"] = n.adhesion;
    nj["regroup"] = n.regroup_node;
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  j["lambda"] = d.lambda;
  return j.dump(indent);
}

std::string iso_result_to_json(const IsoResult& r, int indent) {
  ordered_json j;
  j["schema_version"] = kJsonSchemaVersion;
  j["verdict"] = verdict_name(r.verdict);
  if (r.witness)
    j["witness"] = *r.witness;
  else
    j["witness"] = nullptr;
  j["h"] = r.h;
  ordered_json stats;
  stats["node_pairs"] = r.stats.node_pairs;
  stats["tau_candidates"] = r.stats.tau_candidates;
  stats["coset_calls"] = r.stats.coset_calls;
  stats["s2_candidates"] = r.stats.s2_candidates;
  j["stats"] = std::move(stats);
  if (r.verdict == Verdict::MinorEvidence) j["minor_detail"] = r.minor_detail;
  return j.dump(indent);
}

Corpus corpus_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  Corpus c;
  if (!j.contains("pairs") || !j["pairs"].is_array())
    throw FormatError("corpus manifest must contain a pairs array", 0);
  for (const auto& p : j["pairs"]) {
    CorpusSpec s;
    s.name = p.value("name", "");
    s.generator = p.at("generator").get<std::string>();
    s.expected = p.at("expected").get<std::string>();
    s.seed = p.value("seed", 0ull);
    s.n = p.value("n", 0);
    s.h = p.value("h", 7);
    s.graph_a = p.value("graph_a", "");
    s.graph_b = p.value("graph_b", "");
    if (s.name.empty()) s.name = s.generator + "/" + std::to_string(s.seed);
    c.pairs.push_back(std::move(s));
  }
  return c;
}

std::string corpus_report_to_json(const CorpusReport& r, int indent) {
  ordered_json j;
  j["schema_version"] = kJsonSchemaVersion;
  ordered_json pairs = ordered_json::array();
  for (const auto& p : r.pairs) {
    ordered_json pj;
    pj["name"] = p.name;
    pj["expected"] = p.expected;
    if (!p.fpt_verdict.empty()) pj["fpt"] = p.fpt_verdict;
    if (!p.oracle_verdict.empty()) pj["oracle"] = p.oracle_verdict;
    pj["match"] = p.match;
    pairs.push_back(std::move(pj));
  }
  j["pairs"] = std::move(pairs);
  j["failures"] = r.failures;
  return j.dump(indent);
}

std::string corpus_report_table(const CorpusReport& r) {
  std::ostringstream out;
  out << std::left << std::setw(28) << "pair" << std::setw(10) << "expected" << std::setw(16)
      << "fpt" << std::setw(10) << "oracle" << std::setw(7) << "match" << "wall_ms\n";
  for (const auto& p : r.pairs) {
    out << std::left << std::setw(28) << p.name << std::setw(10) << p.expected << std::setw(16)
        << (p.fpt_verdict.empty() ? "-" : p.fpt_verdict) << std::setw(10)
        << (p.oracle_verdict.empty() ? "-" : p.oracle_verdict) << std::setw(7)
        << (p.match ? "yes" : "NO") << std::fixed << std::setprecision(1) << p.wall_ms << "\n";
  }
  out << (r.failures == 0 ? "all pairs match" : std::to_string(r.failures) + " mismatches")
      << "\n";
  return out.str();
}

}  // namespace k3h
