#pragma once

#include "nsbench/corpus.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace nsbench {

// Deterministic generator for test and demo corpora with known structure.
//
// Layout for the default options (200 documents):
//   35 simple clusters: main patent, near-copy X prior art, a same-topic Y
//      citation and an off-topic A citation. Five mains are filed more than ten
//      years before the reference date, one exactly ten years before.
//      The 50 mains inside the recency window split 25 CN / 10 US / 10 EP / 5 WO.
//   10 family clusters: main patent and a family member, each with its own
//      near-copy X prior art. Six members are near-identical to their main,
//      four carry only a truncated description.
//   20 distractors without citations.
// Eight extra X citations point at documents missing from the corpus.
struct SyntheticOptions {
    std::uint64_t seed = 42;
    Date reference_date{2025, 1, 1};
    // Every document in English; otherwise CN documents are Chinese and five CN
    // mains cite English prior art as X.
    bool monolingual = false;
    // Adds five extra documents, each with one validation defect.
    bool plant_defects = false;
};

struct FamilyPairTruth {
    std::string main_id;
    std::string member_id;
    // Alignment score planted for table-driven scoring; the member's text is
    // near-identical to the main exactly when this is at least 0.90.
    double planted_score = 0.0;
};

struct SyntheticTruth {
    std::vector<std::pair<std::string, std::string>> x_edges; // resolved examiner X citations
    std::vector<CitationRecord> dangling;
    std::map<std::string, std::vector<std::string>> families; // multi-member families only
    std::vector<FamilyPairTruth> family_pairs;
    std::set<std::string> main_ids;      // patents holding a resolved X citation
    std::map<std::string, std::size_t> main_jurisdictions;     // planned, over main_ids
    std::map<std::string, std::size_t> retained_jurisdictions; // planned, over mains inside the recency window
    std::set<std::string> stale_mains;   // filed before the recency cutoff
    std::set<std::string> near_copies;   // prior art whose text copies its citing main
    std::vector<std::pair<std::string, std::string>> defects; // (doc_id, defect)
};

struct SyntheticCorpus {
    Corpus corpus;
    SyntheticTruth truth;
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticOptions& options = {});

} // namespace nsbench
