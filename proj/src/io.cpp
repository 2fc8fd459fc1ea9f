#include "rencontre/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "rencontre/errors.hpp"

namespace rencontre {

namespace {

void append_escaped_json(std::string& out, const std::string& s) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out.push_back(c);
            }
        }
    }
    out.push_back('"');
}

} // namespace

std::string format_double_json(double v) {
    if (!std::isfinite(v))
        return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_double_table(double v) {
    if (!std::isfinite(v))
        return "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

JsonDoc& JsonDoc::set(const std::string& key, JsonDoc value) {
    auto* obj = std::get_if<Object>(&node_);
    if (!obj)
        throw std::logic_error("set() on a non-object JSON node");
    obj->fields.emplace_back(key, std::move(value));
    return *this;
}

JsonDoc& JsonDoc::push(JsonDoc value) {
    auto* arr = std::get_if<Array>(&node_);
    if (!arr)
        throw std::logic_error("push() on a non-array JSON node");
    arr->items.push_back(std::move(value));
    return *this;
}

void JsonDoc::write(std::string& out) const {
    struct Visitor {
        std::string& out;
        void operator()(std::nullptr_t) const { out += "null"; }
        void operator()(bool b) const { out += b ? "true" : "false"; }
        void operator()(double v) const { out += format_double_json(v); }
        void operator()(std::int64_t v) const { out += std::to_string(v); }
        void operator()(const std::string& s) const { append_escaped_json(out, s); }
        void operator()(const Object& o) const {
            out.push_back('{');
            bool first = true;
            for (const auto& [k, v] : o.fields) {
                if (!first)
                    out.push_back(',');
                first = false;
                append_escaped_json(out, k);
                out.push_back(':');
                v.write(out);
            }
            out.push_back('}');
        }
        void operator()(const Array& a) const {
            out.push_back('[');
            bool first = true;
            for (const auto& v : a.items) {
                if (!first)
                    out.push_back(',');
                first = false;
                v.write(out);
            }
            out.push_back(']');
        }
    };
    std::visit(Visitor{out}, node_);
}

std::string JsonDoc::dump() const {
    std::string out;
    write(out);
    out.push_back('\n');
    return out;
}

namespace {

JsonDoc from_nlohmann(const nlohmann::ordered_json& j) {
    using nlohmann::ordered_json;
    switch (j.type()) {
    case ordered_json::value_t::null: return JsonDoc();
    case ordered_json::value_t::boolean: return JsonDoc(j.get<bool>());
    case ordered_json::value_t::number_integer: return JsonDoc(j.get<std::int64_t>());
    case ordered_json::value_t::number_unsigned:
        return JsonDoc(static_cast<std::int64_t>(j.get<std::uint64_t>()));
    case ordered_json::value_t::number_float: return JsonDoc(j.get<double>());
    case ordered_json::value_t::string: return JsonDoc(j.get<std::string>());
    case ordered_json::value_t::array: {
        JsonDoc arr = JsonDoc::array();
        for (const auto& item : j)
            arr.push(from_nlohmann(item));
        return arr;
    }
    case ordered_json::value_t::object: {
        JsonDoc obj = JsonDoc::object();
        for (auto it = j.begin(); it != j.end(); ++it)
            obj.set(it.key(), from_nlohmann(it.value()));
        return obj;
    }
    default: throw std::runtime_error("unsupported JSON node");
    }
}

} // namespace

std::string reserialize_json(const std::string& text) {
    const auto parsed = nlohmann::ordered_json::parse(text);
    return from_nlohmann(parsed).dump();
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_)
        throw std::logic_error("CSV row width mismatch");
    bool first = true;
    for (const auto& f : fields) {
        if (!first)
            out_.push_back(',');
        first = false;
        if (f.find_first_of(",\"\n\r") != std::string::npos) {
            out_.push_back('"');
            for (char c : f) {
                if (c == '"')
                    out_.push_back('"');
                out_.push_back(c);
            }
            out_.push_back('"');
        } else {
            out_ += f;
        }
    }
    out_.push_back('\n');
}

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::filesystem::path target(path);
    if (target.is_relative()) {
        if (const char* dir = std::getenv("RENCONTRE_OUT_DIR"); dir && *dir)
            target = std::filesystem::path(dir) / target;
    }
    std::ofstream out(target, std::ios::binary);
    if (!out)
        throw ValidationError("cannot open output path '" + target.string() + "'");
    out << payload;
    if (!out)
        throw ValidationError("failed writing output path '" + target.string() + "'");
}

} // namespace rencontre
