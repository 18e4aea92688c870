#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "k3hiso/json_io.hpp"
#include "k3hiso/oracle.hpp"

using namespace k3h;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNonIso = 1;
constexpr int kExitInput = 2;
constexpr int kExitMinorEvidence = 3;
constexpr int kExitPrecondition = 4;

VertexSet parse_vertex_list(const std::string& text) {
  VertexSet out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  return sorted_set(std::move(out));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct WlArgs {
  std::string file, sidecar, seed_colors;
  int k = 1;
  bool json = false;
};

int cmd_wl(const WlArgs& a) {
  ColoredGraph g = read_graph_file(a.file, a.sidecar);
  VertexColoring seed = uniform_coloring(g.n);
  if (!a.seed_colors.empty()) {
    auto j = nlohmann::json::parse(read_file(a.seed_colors));
    std::vector<int> values = j.get<std::vector<int>>();
    if (static_cast<int>(values.size()) != g.n) throw Error("seed color count mismatch");
    seed = coloring_from_values(values);
  }

  std::vector<VertexSet> classes;
  if (a.k == 1) {
    classes = wl1_stable(g, seed).class_sets();
  } else {
    classes = wl2_stable(g, seed).diagonal().class_sets();
  }
  if (a.json) {
    nlohmann::ordered_json j;
    j["schema_version"] = kJsonSchemaVersion;
    j["k"] = a.k;
    j["classes"] = classes;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << classes.size() << " classes\n";
    for (const auto& c : classes) {
      for (std::size_t i = 0; i < c.size(); ++i) std::cout << (i ? " " : "") << c[i];
      std::cout << "\n";
    }
  }
  return kExitOk;
}

struct ClosureArgs {
  std::string file, sidecar, x;
  int t = 2, k = 2;
  bool json = false;
};

int cmd_closure(const ClosureArgs& a) {
  ColoredGraph g = read_graph_file(a.file, a.sidecar);
  VertexSet x = parse_vertex_list(a.x);
  for (int v : x) g.check_vertex(v);
  VertexSet cl = closure(g, x, a.t, a.k);
  if (a.json) {
    nlohmann::ordered_json j;
    j["schema_version"] = kJsonSchemaVersion;
    j["closure"] = cl;
    std::cout << j.dump(2) << "\n";
  } else {
    for (std::size_t i = 0; i < cl.size(); ++i) std::cout << (i ? " " : "") << cl[i];
    std::cout << "\n";
  }
  return kExitOk;
}

struct DecomposeArgs {
  std::string file, sidecar, s;
  int h = 7;
};

int cmd_decompose(const DecomposeArgs& a) {
  ColoredGraph g = read_graph_file(a.file, a.sidecar);
  VertexSet s = parse_vertex_list(a.s);
  for (int v : s) g.check_vertex(v);
  Decomposition d = decompose(g, s, a.h);
  std::cout << decomposition_to_json(d) << "\n";
  return kExitOk;
}

struct IsoArgs {
  std::string file1, file2, sidecar1, sidecar2;
  int h = -1, genus = -1;
  std::string strategy = "fpt";
  std::uint64_t seed = 0;
  double timeout = 0;
  bool json = false;
  int oracle_cap = 40;
};

int cmd_iso(const IsoArgs& a) {
  if ((a.h < 0) == (a.genus < 0))
    throw CLI::ValidationError("exactly one of --h/--genus is required");
  int h = a.h >= 0 ? a.h : 4 * a.genus + 3;

  ColoredGraph g1 = read_graph_file(a.file1, a.sidecar1);
  ColoredGraph g2 = read_graph_file(a.file2, a.sidecar2);

  std::string strategy = a.strategy;
  if (strategy == "auto")
    strategy = (is_3_connected(g1) && is_3_connected(g2)) ? "fpt" : "oracle";

  IsoResult res;
  res.h = h;
  if (strategy == "fpt") {
    res = isomorphic_k3h_free(g1, g2, h, a.timeout);
  } else if (strategy == "oracle") {
    if (g1.n > a.oracle_cap || g2.n > a.oracle_cap)
      throw PreconditionError("oracle strategy capped at n <= " + std::to_string(a.oracle_cap));
    auto w = brute_force_iso(g1, g2);
    res.verdict = w ? Verdict::Isomorphic : Verdict::NonIsomorphic;
    res.witness = w;
  } else {
    throw CLI::ValidationError("unknown strategy: " + strategy);
  }

  if (a.json) {
    std::cout << iso_result_to_json(res) << "\n";
  } else {
    std::cout << verdict_name(res.verdict) << "\n";
    if (res.witness) {
      for (std::size_t i = 0; i < res.witness->size(); ++i)
        std::cout << (i ? " " : "") << (*res.witness)[i];
      std::cout << "\n";
    }
  }
  switch (res.verdict) {
    case Verdict::Isomorphic:
      return kExitOk;
    case Verdict::NonIsomorphic:
      return kExitNonIso;
    case Verdict::MinorEvidence:
      return kExitMinorEvidence;
  }
  return kExitInput;
}

struct VerifyArgs {
  std::string manifest;
  std::string engine = "both";
  bool json = false;
};

int cmd_verify(const VerifyArgs& a) {
  Corpus corpus = corpus_from_json(read_file(a.manifest));
  CorpusReport report = run_corpus(corpus, a.engine);
  if (a.json)
    std::cout << corpus_report_to_json(report) << "\n";
  else
    std::cout << corpus_report_table(report);
  return report.failures == 0 ? kExitOk : kExitNonIso;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isomorphism of vertex- and arc-colored graphs excluding K_{3,h} minors"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // frees -h / --h for the parameter

  WlArgs wl_args;
  auto* wl = app.add_subcommand("wl", "stable coloring classes (1-WL or 2-WL)");
  wl->set_help_flag("--help", "print help");
  wl->add_option("file", wl_args.file, "graph file (graph6 or DIMACS)")->required();
  wl->add_option("--k", wl_args.k, "WL dimension")->check(CLI::IsMember({1, 2}));
  wl->add_option("--colors", wl_args.sidecar, "color sidecar JSON");
  wl->add_option("--seed-colors", wl_args.seed_colors, "JSON array of per-vertex seed colors");
  wl->add_flag("--json", wl_args.json, "JSON output");

  ClosureArgs cl_args;
  auto* cl = app.add_subcommand("closure", "(t,k)-closure of a vertex set");
  cl->set_help_flag("--help", "print help");
  cl->add_option("file", cl_args.file)->required();
  cl->add_option("--x", cl_args.x, "comma-separated vertex ids")->required();
  cl->add_option("--t", cl_args.t, "class size threshold");
  cl->add_option("--k", cl_args.k, "WL dimension")->check(CLI::IsMember({1, 2}));
  cl->add_option("--colors", cl_args.sidecar, "color sidecar JSON");
  cl->add_flag("--json", cl_args.json, "JSON output");

  DecomposeArgs de_args;
  auto* de = app.add_subcommand("decompose", "anchored tree decomposition (JSON)");
  de->set_help_flag("--help", "print help");
  de->add_option("file", de_args.file)->required();
  de->add_option("--s", de_args.s, "comma-separated boundary set S")->required();
  de->add_option("--h", de_args.h, "excluded-minor parameter")->required();
  de->add_option("--colors", de_args.sidecar, "color sidecar JSON");

  IsoArgs iso_args;
  auto* iso = app.add_subcommand("iso", "decide isomorphism of two graphs");
  iso->set_help_flag("--help", "print help");
  iso->add_option("file1", iso_args.file1)->required();
  iso->add_option("file2", iso_args.file2)->required();
  iso->add_option("--h", iso_args.h, "excluded-minor parameter K_{3,h}");
  iso->add_option("--genus", iso_args.genus, "Euler genus bound (h = 4g+3)");
  iso->add_option("--strategy", iso_args.strategy, "fpt | oracle | auto")
      ->check(CLI::IsMember({"fpt", "oracle", "auto"}));
  iso->add_option("--seed", iso_args.seed, "reserved for reproducibility");
  iso->add_option("--timeout", iso_args.timeout, "soft timeout in seconds");
  iso->add_option("--oracle-cap", iso_args.oracle_cap, "max n for the oracle strategy");
  iso->add_option("--colors1", iso_args.sidecar1, "sidecar for file1");
  iso->add_option("--colors2", iso_args.sidecar2, "sidecar for file2");
  iso->add_flag("--json", iso_args.json, "JSON output");

  VerifyArgs ve_args;
  auto* ve = app.add_subcommand("verify", "run a corpus manifest through both engines");
  ve->set_help_flag("--help", "print help");
  ve->add_option("manifest", ve_args.manifest)->required();
  ve->add_option("--engine", ve_args.engine, "fpt | oracle | both")
      ->check(CLI::IsMember({"fpt", "oracle", "both"}));
  ve->add_flag("--json", ve_args.json, "JSON output");

  try {
    app.parse(argc, argv);
    if (wl->parsed()) return cmd_wl(wl_args);
    if (cl->parsed()) return cmd_closure(cl_args);
    if (de->parsed()) return cmd_decompose(de_args);
    if (iso->parsed()) return cmd_iso(iso_args);
    if (ve->parsed()) return cmd_verify(ve_args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  } catch (const MinorEvidenceError& e) {
    std::cerr << "minor-evidence: " << e.what() << "\n";
    return kExitMinorEvidence;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
