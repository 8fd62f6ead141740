#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace depstat {

/// Minimal JSON emitter with a fixed, caller-controlled key order and doubles
/// rendered with 17 significant digits. Identical inputs therefore serialize
/// to identical bytes, which is what makes seeded CLI runs diffable.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(std::string_view k);

    JsonWriter& value(double x);
    JsonWriter& value(std::int64_t x);
    JsonWriter& value(std::uint64_t x);
    JsonWriter& value(int x) { return value(static_cast<std::int64_t>(x)); }
    JsonWriter& value(bool b);
    JsonWriter& value(std::string_view s);
    JsonWriter& value(const char* s) { return value(std::string_view(s)); }

    JsonWriter& kv(std::string_view k, double x) { return key(k).value(x); }
    JsonWriter& kv(std::string_view k, std::int64_t x) { return key(k).value(x); }
    JsonWriter& kv(std::string_view k, std::uint64_t x) { return key(k).value(x); }
    JsonWriter& kv(std::string_view k, int x) { return key(k).value(x); }
    JsonWriter& kv(std::string_view k, bool b) { return key(k).value(b); }
    JsonWriter& kv(std::string_view k, std::string_view s) { return key(k).value(s); }
    JsonWriter& kv(std::string_view k, const char* s) { return key(k).value(std::string_view(s)); }

    JsonWriter& values(std::span<const double> xs);

    const std::string& str() const { return out_; }

    /// Format a double exactly as value(double) does ("%.17g").
    static std::string format_double(double x);

private:
    void separator();
    void raw(std::string_view s);
    void value_string(std::string_view s);

    std::string out_;
    std::vector<bool> needs_comma_;
    bool pending_key_ = false;
};

}  // namespace depstat
