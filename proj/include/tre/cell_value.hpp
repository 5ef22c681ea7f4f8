#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace tre {

enum class ValueKind { null, boolean, integer, real, text, temporal };

std::string_view to_string(ValueKind kind);

/// A calendar-ish value kept as its normalized ISO text ("2021-03-05" or "2021").
struct Temporal {
    std::string iso;
    auto operator<=>(const Temporal&) const = default;
};

/// Typed cell payload. Integer/Real are always finite; Null carries neither
/// payload nor unit. The optional unit tag houses things like "%" or "thousands".
class CellValue {
  public:
    CellValue() = default;

    static CellValue null() { return CellValue(); }
    static CellValue boolean(bool b);
    static CellValue integer(std::int64_t v);
    static CellValue real(double v, std::optional<std::string> unit = std::nullopt);
    static CellValue text(std::string s);
    static CellValue temporal(std::string iso);

    ValueKind kind() const;
    bool is_null() const { return kind() == ValueKind::null; }
    bool is_numeric() const {
        return kind() == ValueKind::integer || kind() == ValueKind::real;
    }

    bool as_bool() const;
    std::int64_t as_integer() const;
    double as_real() const; // integer widens to double
    const std::string& as_text() const;
    const Temporal& as_temporal() const;

    const std::optional<std::string>& unit() const { return unit_; }
    void set_unit(std::optional<std::string> unit);

    /// Canonical text rendering. Round-trips through infer_value for every
    /// value infer_value can produce (Reals keep a '.' or exponent so they
    /// never re-read as Integer).
    std::string to_text() const;

    bool operator==(const CellValue& other) const = default;

  private:
    std::variant<std::monostate, bool, std::int64_t, double, std::string, Temporal> payload_;
    std::optional<std::string> unit_;
};

/// Deterministic, locale-independent typing of raw text (dot decimal only):
/// empty -> Null, 4-digit year in [1000,2999] or ISO yyyy-mm-dd -> Temporal,
/// integer literal -> Integer, decimal/scientific -> Real, trailing "%" ->
/// Real with unit "%" (face value kept, no /100), anything else -> Text.
CellValue infer_value(std::string_view raw);

std::string_view trim(std::string_view text);

} // namespace tre
