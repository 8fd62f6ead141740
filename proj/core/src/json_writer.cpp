#include "depstat/json_writer.hpp"

#include <cstdio>

namespace depstat {

void JsonWriter::raw(std::string_view s) { out_.append(s); }

void JsonWriter::separator() {
    if (pending_key_) {
        pending_key_ = false;
        return;
    }
    if (!needs_comma_.empty()) {
        if (needs_comma_.back()) raw(",");
        needs_comma_.back() = true;
    }
}

JsonWriter& JsonWriter::begin_object() {
    separator();
    raw("{");
    needs_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    needs_comma_.pop_back();
    raw("}");
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    separator();
    raw("[");
    needs_comma_.push_back(false);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    needs_comma_.pop_back();
    raw("]");
    return *this;
}

JsonWriter& JsonWriter::key(std::string_view k) {
    separator();
    value_string(k);
    raw(":");
    pending_key_ = true;
    return *this;
}

std::string JsonWriter::format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

JsonWriter& JsonWriter::value(double x) {
    separator();
    raw(format_double(x));
    return *this;
}

JsonWriter& JsonWriter::value(std::int64_t x) {
    separator();
    char buf[24];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(x));
    raw(buf);
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t x) {
    separator();
    char buf[24];
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(x));
    raw(buf);
    return *this;
}

JsonWriter& JsonWriter::value(bool b) {
    separator();
    raw(b ? "true" : "false");
    return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
    separator();
    value_string(s);
    return *this;
}

JsonWriter& JsonWriter::values(std::span<const double> xs) {
    begin_array();
    for (double x : xs) value(x);
    end_array();
    return *this;
}

void JsonWriter::value_string(std::string_view s) {
    out_.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': raw("\\\""); break;
            case '\\': raw("\\\\"); break;
            case '\n': raw("\\n"); break;
            case '\r': raw("\\r"); break;
            case '\t': raw("\\t"); break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    raw(buf);
                } else {
                    out_.push_back(c);
                }
        }
    }
    out_.push_back('"');
}

}  // namespace depstat
