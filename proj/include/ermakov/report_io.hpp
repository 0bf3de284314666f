// Deterministic CSV and JSON emission: fixed float formatting (17
// significant digits, '.' decimal separator), '\n' line endings, insertion
// -ordered JSON objects. Two runs over identical inputs produce
// byte-identical files.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "ermakov/errors.hpp"

namespace ermakov::io {

/// Shortest-faithful fixed formatting: %.17g round-trips every double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& row) {
        if (row.size() != header_.size())
            throw std::logic_error("Csv: row width mismatch");
        rows_.push_back(row);
    }

    std::string to_string() const {
        std::string out;
        for (size_t i = 0; i < header_.size(); ++i) {
            if (i) out += ',';
            out += header_[i];
        }
        out += '\n';
        for (const auto& row : rows_) {
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += format_double(row[i]);
            }
            out += '\n';
        }
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

/// Insertion-ordered JSON document builder.
class Json {
public:
    Json() : kind_(Kind::null) {}
    static Json number(double v) { Json j; j.kind_ = Kind::number; j.num_ = v; return j; }
    static Json integer(long long v) { Json j; j.kind_ = Kind::integer; j.int_ = v; return j; }
    static Json boolean(bool v) { Json j; j.kind_ = Kind::boolean; j.bool_ = v; return j; }
    static Json string(std::string v) { Json j; j.kind_ = Kind::string; j.str_ = std::move(v); return j; }
    static Json object() { Json j; j.kind_ = Kind::object; return j; }
    static Json array() { Json j; j.kind_ = Kind::array; return j; }

    Json& set(const std::string& key, Json v) {
        require(Kind::object);
        members_.emplace_back(key, std::make_shared<Json>(std::move(v)));
        return *this;
    }
    Json& set(const std::string& key, double v) { return set(key, number(v)); }
    template <typename T>
        requires(std::is_integral_v<T> && !std::is_same_v<T, bool>)
    Json& set(const std::string& key, T v) {
        return set(key, integer(static_cast<long long>(v)));
    }
    Json& set(const std::string& key, bool v) { return set(key, boolean(v)); }
    Json& set(const std::string& key, const char* v) { return set(key, string(v)); }
    Json& set(const std::string& key, const std::string& v) { return set(key, string(v)); }

    Json& push(Json v) {
        require(Kind::array);
        items_.push_back(std::make_shared<Json>(std::move(v)));
        return *this;
    }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out += '\n';
        return out;
    }

private:
    enum class Kind { null, number, integer, boolean, string, object, array };
    Kind kind_;
    double num_ = 0.0;
    long long int_ = 0;
    bool bool_ = false;
    std::string str_;
    std::vector<std::pair<std::string, std::shared_ptr<Json>>> members_;
    std::vector<std::shared_ptr<Json>> items_;

    void require(Kind k) {
        if (kind_ == Kind::null) kind_ = k;
        if (kind_ != k) throw std::logic_error("Json: kind mismatch");
    }

    static void escape_into(std::string& out, const std::string& s) {
        out += '"';
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out += buf;
                    } else {
                        out += c;
                    }
            }
        }
        out += '"';
    }

    void write(std::string& out, int indent, int depth) const {
        const std::string pad(static_cast<size_t>(indent) * depth, ' ');
        const std::string pad1(static_cast<size_t>(indent) * (depth + 1), ' ');
        switch (kind_) {
            case Kind::null: out += "null"; break;
            case Kind::number: out += format_double(num_); break;
            case Kind::integer: out += std::to_string(int_); break;
            case Kind::boolean: out += bool_ ? "true" : "false"; break;
            case Kind::string: escape_into(out, str_); break;
            case Kind::object: {
                if (members_.empty()) { out += "{}"; break; }
                out += "{\n";
                for (size_t i = 0; i < members_.size(); ++i) {
                    out += pad1;
                    escape_into(out, members_[i].first);
                    out += ": ";
                    members_[i].second->write(out, indent, depth + 1);
                    if (i + 1 < members_.size()) out += ',';
                    out += '\n';
                }
                out += pad + "}";
                break;
            }
            case Kind::array: {
                if (items_.empty()) { out += "[]"; break; }
                out += "[\n";
                for (size_t i = 0; i < items_.size(); ++i) {
                    out += pad1;
                    items_[i]->write(out, indent, depth + 1);
                    if (i + 1 < items_.size()) out += ',';
                    out += '\n';
                }
                out += pad + "]";
                break;
            }
        }
    }
};

inline void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ScenarioError("cannot open output file " + path.string());
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw ScenarioError("failed writing " + path.string());
}

}  // namespace ermakov::io
