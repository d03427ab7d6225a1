#include "g2l/io.hpp"
#include "g2l/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

namespace g2l {

namespace {

using ordered_json = nlohmann::ordered_json;

std::optional<double> parse_number(std::string_view field) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw validation_error("cannot open '" + path.string() + "'");
    }
    Dataset ds;
    ds.name = path.stem().string();

    std::string line;
    std::size_t line_no = 0;
    std::size_t data_row = 0;
    std::size_t expected_components = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);

        // A header is any first line whose non-id fields are not all numeric.
        if (first_content_line) {
            first_content_line = false;
            bool all_numeric = fields.size() >= 2;
            for (std::size_t i = 1; i < fields.size(); ++i) {
                if (!parse_number(fields[i])) {
                    all_numeric = false;
                    break;
                }
            }
            if (!all_numeric) continue;
        }

        if (fields.size() < 2) {
            throw validation_error(path.string() + ":" + std::to_string(line_no) +
                                   ": row has no components");
        }
        FeatureVector fv;
        fv.id = fields[0].empty() ? "row_" + std::to_string(data_row) : fields[0];
        fv.components.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const auto value = parse_number(fields[i]);
            if (!value) {
                throw validation_error(path.string() + ":" + std::to_string(line_no) +
                                       ": non-numeric component '" + fields[i] + "'");
            }
            fv.components.push_back(*value);
        }
        if (expected_components == 0) {
            expected_components = fv.components.size();
        } else if (fv.components.size() != expected_components) {
            throw validation_error(path.string() + ":" + std::to_string(line_no) +
                                   ": ragged row with " + std::to_string(fv.components.size()) +
                                   " components, expected " + std::to_string(expected_components));
        }
        ds.vectors.push_back(std::move(fv));
        ++data_row;
    }
    if (ds.vectors.empty()) {
        throw validation_error(path.string() + ": no vector rows found");
    }
    return ds;
}

Dataset load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw validation_error("cannot open '" + path.string() + "'");
    }
    Dataset ds;
    ds.name = path.stem().string();

    std::string line;
    std::size_t line_no = 0;
    std::size_t data_row = 0;
    std::size_t expected_components = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw validation_error(path.string() + ":" + std::to_string(line_no) +
                                   ": invalid JSON (" + e.what() + ")");
        }
        if (!record.is_object() || !record.contains("v") || !record["v"].is_array()) {
            throw validation_error(path.string() + ":" + std::to_string(line_no) +
                                   ": expected an object with a \"v\" array");
        }
        FeatureVector fv;
        if (record.contains("id") && record["id"].is_string() &&
            !record["id"].get<std::string>().empty()) {
            fv.id = record["id"].get<std::string>();
        } else {
            fv.id = "row_" + std::to_string(data_row);
        }
        for (const auto& item : record["v"]) {
            if (!item.is_number()) {
                throw validation_error(path.string() + ":" + std::to_string(line_no) +
                                       ": non-numeric component in \"v\"");
            }
            fv.components.push_back(item.get<double>());
        }
        if (fv.components.empty()) {
            throw validation_error(path.string() + ":" + std::to_string(line_no) +
                                   ": empty component array");
        }
        if (expected_components == 0) {
            expected_components = fv.components.size();
        } else if (fv.components.size() != expected_components) {
            throw validation_error(path.string() + ":" + std::to_string(line_no) +
                                   ": ragged row with " + std::to_string(fv.components.size()) +
                                   " components, expected " + std::to_string(expected_components));
        }
        ds.vectors.push_back(std::move(fv));
        ++data_row;
    }
    if (ds.vectors.empty()) {
        throw validation_error(path.string() + ": no vector rows found");
    }
    return ds;
}

} // namespace

VectorFormat parse_vector_format(std::string_view name) {
    if (name == "csv") return VectorFormat::csv;
    if (name == "jsonl") return VectorFormat::jsonl;
    throw validation_error("unknown vector format '" + std::string(name) + "'");
}

VectorFormat vector_format_for_path(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".csv") return VectorFormat::csv;
    if (ext == ".jsonl") return VectorFormat::jsonl;
    throw validation_error("cannot infer vector format from '" + path.string() +
                           "' (expected .csv or .jsonl)");
}

Dataset load_vectors(const std::filesystem::path& path, VectorFormat format) {
    Dataset ds = format == VectorFormat::csv ? load_csv(path) : load_jsonl(path);
    ds.validate();
    return ds;
}

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        throw validation_error("failed to format a double");
    }
    return std::string(buffer, ptr);
}

void save_vectors(const Dataset& ds, const std::filesystem::path& path, VectorFormat format) {
    std::ofstream out(path);
    if (!out) {
        throw validation_error("cannot write '" + path.string() + "'");
    }
    if (format == VectorFormat::csv) {
        out << "id";
        for (std::size_t c = 0; c < ds.dimension(); ++c) out << ",v" << c;
        out << "\n";
        for (const auto& fv : ds.vectors) {
            out << fv.id;
            for (double v : fv.components) out << "," << format_double(v);
            out << "\n";
        }
    } else {
        for (const auto& fv : ds.vectors) {
            ordered_json record;
            record["id"] = fv.id;
            record["v"] = fv.components;
            out << record.dump() << "\n";
        }
    }
    if (!out) {
        throw validation_error("write failed for '" + path.string() + "'");
    }
}

AnchorSet load_anchor_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw validation_error("cannot open '" + path.string() + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(path.string() + ": invalid JSON (" + e.what() + ")");
    }
    if (!doc.is_object() || !doc.contains("metric") || !doc.contains("representatives")) {
        throw validation_error(path.string() +
                               ": expected {\"metric\": ..., \"representatives\": [...]}");
    }
    AnchorSet anchors;
    anchors.metric = parse_metric(doc["metric"].get<std::string>());
    for (const auto& entry : doc["representatives"]) {
        Representative rep;
        rep.source_name = entry.at("source").get<std::string>();
        rep.rep_index = entry.at("rep_index").get<int>();
        rep.qualified_name = entry.at("qualified_name").get<std::string>();
        rep.vector.id = rep.qualified_name;
        rep.vector.components = entry.at("v").get<std::vector<double>>();
        anchors.representatives.push_back(std::move(rep));
    }
    anchors.validate();
    return anchors;
}

void save_anchor_set(const AnchorSet& anchors, const std::filesystem::path& path) {
    ordered_json doc;
    doc["metric"] = std::string(metric_name(anchors.metric));
    doc["representatives"] = ordered_json::array();
    for (const auto& rep : anchors.representatives) {
        ordered_json entry;
        entry["source"] = rep.source_name;
        entry["rep_index"] = rep.rep_index;
        entry["qualified_name"] = rep.qualified_name;
        entry["v"] = rep.vector.components;
        doc["representatives"].push_back(std::move(entry));
    }
    std::ofstream out(path);
    if (!out) {
        throw validation_error("cannot write '" + path.string() + "'");
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw validation_error("write failed for '" + path.string() + "'");
    }
}

std::filesystem::path companion_path(const std::filesystem::path& path,
                                     const std::string& suffix) {
    std::filesystem::path out = path;
    out.replace_extension();
    out += suffix;
    return out;
}

} // namespace g2l
