#pragma once

#include "sbcn/model.hpp"

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

namespace sbcn {

// Dataset files are headered delimiter-separated text (comma or tab), one row
// per sample. Lines starting with '#' carry provenance and are skipped.

BinaryDataset read_dataset(std::istream& in);
BinaryDataset read_dataset_file(const std::string& path);

void write_dataset(std::ostream& out, const BinaryDataset& data,
                   const std::vector<std::string>& comments = {});
void write_dataset_file(const std::string& path, const BinaryDataset& data,
                        const std::vector<std::string>& comments = {});

// Graph documents are JSON objects with fields `n`, `names` and `arcs`
// ([parent, child] index pairs). Extra fields are preserved on write and
// ignored on read.

struct GraphDocument {
    Dag dag;
    std::vector<std::string> names;
    nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json graph_to_json(const Dag& dag, const std::vector<std::string>& names);
nlohmann::json mask_to_json(const ArcMask& mask, const std::vector<std::string>& names);
GraphDocument graph_from_json(const nlohmann::json& doc);

GraphDocument read_graph_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace sbcn
