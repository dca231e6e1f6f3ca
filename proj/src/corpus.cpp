#include "legalqa/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "legalqa/error.hpp"
#include "legalqa/io.hpp"

namespace legalqa::corpus {

using nlohmann::json;

std::string_view to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::dev: return "dev";
        case Split::test: return "test";
    }
    return "?";
}

Split parse_split(std::string_view name) {
    if (name == "train") return Split::train;
    if (name == "dev") return Split::dev;
    if (name == "test") return Split::test;
    throw ValidationError("unknown split '" + std::string(name) + "' (expected train, dev or test)");
}

std::string_view to_string(Format format) {
    return format == Format::jsonl ? "jsonl" : "csv";
}

Format format_from_path(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return Format::jsonl;
    if (ext == ".csv") return Format::csv;
    throw ValidationError("cannot infer dataset format from '" + path.string() + "' (use .jsonl or .csv)");
}

bool Dataset::has_gold_labels() const {
    for (const auto& rec : records) {
        for (const auto& cand : rec.candidates) {
            if (!cand.gold_label) return false;
        }
    }
    return candidate_count > 0;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<CsvRecord> parse_csv(std::string_view text, const std::string& source) {
    std::vector<CsvRecord> out;
    CsvRecord rec;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;  // distinguishes an empty line from a record with one empty field
    std::size_t line = 1;
    rec.line = 1;

    auto end_field = [&] {
        rec.fields.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        if (field_started || !rec.fields.empty()) {
            end_field();
            out.push_back(std::move(rec));
        }
        rec = CsvRecord{};
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty()) {
                    throw ParseError(source, line, "unexpected quote inside unquoted field");
                }
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                field_started = true;
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                [[fallthrough]];
            case '\n':
                end_record();
                ++line;
                rec.line = line;
                break;
            default:
                field_started = true;
                field.push_back(c);
        }
    }
    if (in_quotes) {
        throw ParseError(source, rec.line, "unterminated quoted field");
    }
    end_record();
    return out;
}

std::string csv_escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

namespace {

std::string normalize_column(std::string name) {
    std::string out;
    for (unsigned char c : name) {
        if (c == ' ' || c == '-') {
            out.push_back('_');
        } else {
            out.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    // Strip a UTF-8 byte order mark on the first header cell.
    if (out.rfind("\xef\xbb\xbf", 0) == 0) out.erase(0, 3);
    return out;
}

std::optional<int> parse_label(const std::string& raw, const std::string& source, std::size_t line) {
    if (raw.empty()) return std::nullopt;
    if (raw == "0" || raw == "0.0") return 0;
    if (raw == "1" || raw == "1.0") return 1;
    throw ParseError(source, line, "label must be 0 or 1, got '" + raw + "'");
}

std::vector<Row> read_csv_rows(std::string_view text, const std::string& source) {
    auto records = parse_csv(text, source);
    std::vector<Row> rows;
    if (records.empty()) return rows;

    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < records[0].fields.size(); ++i) {
        column.emplace(normalize_column(records[0].fields[i]), i);
    }
    for (const char* required : {"question", "answer", "explanation"}) {
        if (!column.count(required)) {
            throw ParseError(source, records[0].line, std::string("missing required column '") + required + "'");
        }
    }
    const std::size_t width = records[0].fields.size();

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != width) {
            throw ParseError(source, rec.line,
                             "expected " + std::to_string(width) + " fields, got " + std::to_string(rec.fields.size()));
        }
        auto get = [&](const char* name) -> std::optional<std::string> {
            auto it = column.find(name);
            if (it == column.end()) return std::nullopt;
            return rec.fields[it->second];
        };
        Row row;
        row.line = rec.line;
        row.question = *get("question");
        row.answer = *get("answer");
        row.explanation = *get("explanation");
        if (auto v = get("label")) row.label = parse_label(*v, source, rec.line);
        if (auto v = get("id"); v && !v->empty()) row.id = *v;
        if (auto v = get("question_id"); v && !v->empty()) row.question_id = *v;
        if (auto v = get("analysis"); v && !v->empty()) row.analysis = *v;
        if (auto v = get("complete_analysis"); v && !v->empty()) row.complete_analysis = *v;
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// JSONL

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& source,
                                           std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(source, line, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<Row> read_jsonl_rows(std::string_view text, const std::string& source) {
    std::vector<Row> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(source, line_no, "expected a JSON object");

        Row row;
        row.line = line_no;
        for (const char* required : {"question", "answer", "explanation"}) {
            auto v = optional_string(obj, required, source, line_no);
            if (!v) throw ParseError(source, line_no, std::string("missing field '") + required + "'");
            if (std::string_view(required) == "question") row.question = *v;
            if (std::string_view(required) == "answer") row.answer = *v;
            if (std::string_view(required) == "explanation") row.explanation = *v;
        }
        if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
            if (it->is_number_integer() || it->is_number_unsigned()) {
                auto v = it->get<long long>();
                if (v != 0 && v != 1) throw ParseError(source, line_no, "label must be 0 or 1");
                row.label = static_cast<int>(v);
            } else if (it->is_string()) {
                row.label = parse_label(it->get<std::string>(), source, line_no);
            } else if (it->is_boolean()) {
                row.label = it->get<bool>() ? 1 : 0;
            } else {
                throw ParseError(source, line_no, "label must be 0 or 1");
            }
        }
        row.id = optional_string(obj, "id", source, line_no);
        row.question_id = optional_string(obj, "question_id", source, line_no);
        row.analysis = optional_string(obj, "analysis", source, line_no);
        row.complete_analysis = optional_string(obj, "complete_analysis", source, line_no);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string number_id(char prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%04zu", prefix, n);
    return buf;
}

}  // namespace

std::vector<Row> read_rows(const std::filesystem::path& path, Format format) {
    const auto text = io::read_file(path);
    const auto source = path.string();
    return format == Format::jsonl ? read_jsonl_rows(text, source) : read_csv_rows(text, source);
}

Dataset build_dataset(const std::vector<Row>& rows, Split split, const std::string& source) {
    if (rows.empty()) throw EmptyDatasetError(source + ": dataset is empty");

    Dataset ds;
    ds.split_name = split;

    std::map<std::pair<std::string, std::string>, std::size_t> group_of;
    std::set<std::string> candidate_ids;
    std::set<std::string> question_ids;

    for (const auto& row : rows) {
        if (row.question.empty()) throw ValidationError(source + ":" + std::to_string(row.line) + ": empty question");
        if (row.answer.empty()) throw ValidationError(source + ":" + std::to_string(row.line) + ": empty answer");
        if (split != Split::test && !row.label) {
            throw ValidationError(source + ":" + std::to_string(row.line) + ": missing label in " +
                                  std::string(to_string(split)) + " split");
        }

        auto key = std::make_pair(row.question, row.explanation);
        auto [it, inserted] = group_of.emplace(key, ds.records.size());
        if (inserted) {
            QaRecord rec;
            rec.question_id = row.question_id ? *row.question_id : number_id('q', ds.records.size() + 1);
            if (!question_ids.insert(rec.question_id).second) {
                throw ValidationError(source + ":" + std::to_string(row.line) + ": duplicate question_id '" +
                                      rec.question_id + "' for a different question");
            }
            rec.question_text = row.question;
            rec.explanation_text = row.explanation;
            rec.analysis_text = row.analysis;
            rec.complete_analysis_text = row.complete_analysis;
            ds.records.push_back(std::move(rec));
        }
        auto& rec = ds.records[it->second];
        if (row.question_id && *row.question_id != rec.question_id) {
            throw ValidationError(source + ":" + std::to_string(row.line) + ": question_id '" + *row.question_id +
                                  "' conflicts with '" + rec.question_id + "' for the same question");
        }

        AnswerCandidate cand;
        cand.question_id = rec.question_id;
        cand.candidate_id =
            row.id ? *row.id : rec.question_id + "_a" + std::to_string(rec.candidates.size() + 1);
        if (!candidate_ids.insert(cand.candidate_id).second) {
            throw ValidationError(source + ":" + std::to_string(row.line) + ": duplicate candidate id '" +
                                  cand.candidate_id + "'");
        }
        cand.answer_text = row.answer;
        cand.gold_label = row.label;
        rec.candidates.push_back(std::move(cand));
        ++ds.candidate_count;
    }
    return ds;
}

Dataset load_split(const std::filesystem::path& path, Format format, Split split) {
    return build_dataset(read_rows(path, format), split, path.string());
}

Dataset load_split(const std::filesystem::path& path, Split split) {
    return load_split(path, format_from_path(path), split);
}

std::vector<QaRecord> group_by_question(const Dataset& dataset) {
    std::vector<QaRecord> groups;
    std::map<std::pair<std::string, std::string>, std::size_t> group_of;
    for (const auto& rec : dataset.records) {
        auto key = std::make_pair(rec.question_text, rec.explanation_text);
        auto [it, inserted] = group_of.emplace(key, groups.size());
        if (inserted) {
            QaRecord head = rec;
            head.candidates.clear();
            groups.push_back(std::move(head));
        }
        auto& group = groups[it->second];
        for (auto cand : rec.candidates) {
            cand.question_id = group.question_id;
            group.candidates.push_back(std::move(cand));
        }
    }
    return groups;
}

void save_split(const Dataset& dataset, const std::filesystem::path& path, Format format) {
    std::ostringstream out;
    if (format == Format::jsonl) {
        for (const auto& rec : dataset.records) {
            for (const auto& cand : rec.candidates) {
                json obj = {{"id", cand.candidate_id},
                            {"question_id", rec.question_id},
                            {"question", rec.question_text},
                            {"answer", cand.answer_text},
                            {"explanation", rec.explanation_text}};
                if (cand.gold_label) obj["label"] = *cand.gold_label;
                if (rec.analysis_text) obj["analysis"] = *rec.analysis_text;
                if (rec.complete_analysis_text) obj["complete_analysis"] = *rec.complete_analysis_text;
                out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
            }
        }
    } else {
        out << "id,question_id,question,answer,explanation,label,analysis,complete_analysis\r\n";
        for (const auto& rec : dataset.records) {
            for (const auto& cand : rec.candidates) {
                out << csv_escape(cand.candidate_id) << ',' << csv_escape(rec.question_id) << ','
                    << csv_escape(rec.question_text) << ',' << csv_escape(cand.answer_text) << ','
                    << csv_escape(rec.explanation_text) << ','
                    << (cand.gold_label ? std::to_string(*cand.gold_label) : std::string()) << ','
                    << csv_escape(rec.analysis_text.value_or("")) << ','
                    << csv_escape(rec.complete_analysis_text.value_or("")) << "\r\n";
            }
        }
    }
    io::write_file_atomic(path, out.str());
}

}  // namespace legalqa::corpus
