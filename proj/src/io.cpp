#include "sbcn/io.hpp"

#include "sbcn/error.hpp"

#include <fstream>
#include <sstream>

namespace sbcn {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

}  // namespace

BinaryDataset read_dataset(std::istream& in) {
    std::string line;
    std::vector<std::string> names;
    char delim = ',';
    bool have_header = false;
    std::vector<std::vector<std::uint8_t>> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!have_header) {
            delim = t.find('\t') != std::string::npos ? '\t' : ',';
            names = split(t, delim);
            have_header = true;
            continue;
        }
        const auto cells = split(t, delim);
        const std::size_t row = rows.size() + 1;
        if (cells.size() != names.size()) {
            throw ParseError("row " + std::to_string(row) + " (line " + std::to_string(line_no) + "): found " +
                             std::to_string(cells.size()) + " cells, expected " + std::to_string(names.size()));
        }
        std::vector<std::uint8_t> values(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c] == "0") values[c] = 0;
            else if (cells[c] == "1") values[c] = 1;
            else {
                throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(c + 1) + " ('" +
                                 names[c] + "'): invalid cell '" + cells[c] + "'");
            }
        }
        rows.push_back(std::move(values));
    }
    if (!have_header) throw ParseError("dataset has no header line");
    if (rows.empty()) throw ParseError("dataset has no samples");
    try {
        return BinaryDataset(std::move(names), rows);
    } catch (const InvalidInput& e) {
        throw ParseError(e.what());
    }
}

BinaryDataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_dataset(in);
}

void write_dataset(std::ostream& out, const BinaryDataset& data, const std::vector<std::string>& comments) {
    for (const auto& c : comments) out << "# " << c << '\n';
    const auto& names = data.names();
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << '\n';
    std::string line(2 * names.size(), ',');
    line.back() = '\n';
    for (std::size_t r = 0; r < data.samples(); ++r) {
        for (std::size_t c = 0; c < names.size(); ++c) line[2 * c] = static_cast<char>('0' + data.at(r, c));
        out << line;
    }
}

void write_dataset_file(const std::string& path, const BinaryDataset& data, const std::vector<std::string>& comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_dataset(out, data, comments);
    if (!out) throw IoError("write to '" + path + "' failed");
}

nlohmann::json graph_to_json(const Dag& dag, const std::vector<std::string>& names) {
    nlohmann::json arcs = nlohmann::json::array();
    for (const auto& a : dag.arcs()) arcs.push_back({a.parent, a.child});
    return {{"n", dag.nodes()}, {"names", names}, {"arcs", arcs}};
}

nlohmann::json mask_to_json(const ArcMask& mask, const std::vector<std::string>& names) {
    nlohmann::json arcs = nlohmann::json::array();
    for (const auto& a : mask.arcs()) arcs.push_back({a.parent, a.child});
    return {{"n", mask.nodes()}, {"names", names}, {"arcs", arcs}};
}

GraphDocument graph_from_json(const nlohmann::json& doc) {
    try {
        GraphDocument out;
        const auto n = doc.at("n").get<std::size_t>();
        if (doc.contains("names")) {
            out.names = doc.at("names").get<std::vector<std::string>>();
        } else {
            out.names = BinaryDataset::default_names(n);
        }
        if (out.names.size() != n) throw ParseError("graph document: names has wrong length");
        std::vector<Arc> arcs;
        for (const auto& pair : doc.at("arcs")) {
            if (!pair.is_array() || pair.size() != 2) throw ParseError("graph document: arcs must be pairs");
            arcs.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
        }
        out.dag = Dag(n, std::move(arcs));
        for (const auto& [key, value] : doc.items()) {
            if (key != "n" && key != "names" && key != "arcs") out.extra[key] = value;
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("graph document: ") + e.what());
    }
}

GraphDocument read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    return graph_from_json(doc);
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace sbcn
