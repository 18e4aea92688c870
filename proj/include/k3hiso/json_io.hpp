#pragma once

#include <string>

#include "k3hiso/decomposition.hpp"
#include "k3hiso/fpt_iso.hpp"
#include "k3hiso/oracle.hpp"

namespace k3h {

inline constexpr int kJsonSchemaVersion = 1;

std::string decomposition_to_json(const Decomposition& d, int indent = 2);
std::string iso_result_to_json(const IsoResult& r, int indent = 2);

Corpus corpus_from_json(const std::string& text);
// Deterministic JSON (no wall times); times appear in the table output only.
std::string corpus_report_to_json(const CorpusReport& r, int indent = 2);
std::string corpus_report_table(const CorpusReport& r);

}  // namespace k3h
