#pragma once

#include <cstdint>
#include <type_traits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rencontre {

/// Minimal ordered JSON document model for emission. Numbers print with 17
/// significant digits so every serialized document re-parses and re-serializes
/// byte-identically.
class JsonDoc {
public:
    using Value = JsonDoc;

    JsonDoc() : node_(nullptr) {}
    JsonDoc(bool b) : node_(b) {}
    JsonDoc(double v) : node_(v) {}
    template <typename T, typename = std::enable_if_t<std::is_integral_v<T> && !std::is_same_v<T, bool>>>
    JsonDoc(T v) : node_(static_cast<std::int64_t>(v)) {}
    JsonDoc(const char* s) : node_(std::string(s)) {}
    JsonDoc(std::string s) : node_(std::move(s)) {}

    static JsonDoc object() {
        JsonDoc d;
        d.node_ = Object{};
        return d;
    }
    static JsonDoc array() {
        JsonDoc d;
        d.node_ = Array{};
        return d;
    }

    JsonDoc& set(const std::string& key, JsonDoc value);
    JsonDoc& push(JsonDoc value);

    std::string dump() const;

private:
    struct Object {
        std::vector<std::pair<std::string, JsonDoc>> fields;
    };
    struct Array {
        std::vector<JsonDoc> items;
    };
    std::variant<std::nullptr_t, bool, double, std::int64_t, std::string, Object, Array> node_;

    void write(std::string& out) const;
};

std::string format_double_json(double v);  // 17 significant digits
std::string format_double_table(double v); // 6 significant digits

/// Parse a JSON document and re-serialize it with this module's formatting;
/// fixed point of serialize(parse(.)) for documents we emit.
std::string reserialize_json(const std::string& text);

/// RFC-4180-style CSV: header row, comma separation, quotes doubled and
/// applied when a field contains a comma, quote or newline.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<std::string>& fields);
    const std::string& str() const { return out_; }

private:
    std::string out_;
    std::size_t columns_;
};

/// Writes to path (honoring RENCONTRE_OUT_DIR for relative paths) or stdout
/// when path is empty.
void write_output(const std::string& path, const std::string& payload);

} // namespace rencontre
