#include "tre/cell_value.hpp"

#include "tre/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <format>

namespace tre {

std::string_view to_string(ValueKind kind) {
    switch (kind) {
    case ValueKind::null: return "null";
    case ValueKind::boolean: return "bool";
    case ValueKind::integer: return "integer";
    case ValueKind::real: return "real";
    case ValueKind::text: return "text";
    case ValueKind::temporal: return "temporal";
    }
    return "?";
}

CellValue CellValue::boolean(bool b) {
    CellValue v;
    v.payload_ = b;
    return v;
}

CellValue CellValue::integer(std::int64_t i) {
    CellValue v;
    v.payload_ = i;
    return v;
}

CellValue CellValue::real(double d, std::optional<std::string> unit) {
    if (!std::isfinite(d)) {
        raise(Errc::invalid_argument, "Real cells must be finite");
    }
    CellValue v;
    v.payload_ = d;
    v.unit_ = std::move(unit);
    return v;
}

CellValue CellValue::text(std::string s) {
    CellValue v;
    v.payload_ = std::move(s);
    return v;
}

CellValue CellValue::temporal(std::string iso) {
    CellValue v;
    v.payload_ = Temporal{std::move(iso)};
    return v;
}

ValueKind CellValue::kind() const {
    return static_cast<ValueKind>(payload_.index());
}

bool CellValue::as_bool() const { return std::get<bool>(payload_); }
std::int64_t CellValue::as_integer() const { return std::get<std::int64_t>(payload_); }

double CellValue::as_real() const {
    if (kind() == ValueKind::integer) {
        return static_cast<double>(std::get<std::int64_t>(payload_));
    }
    return std::get<double>(payload_);
}

const std::string& CellValue::as_text() const { return std::get<std::string>(payload_); }
const Temporal& CellValue::as_temporal() const { return std::get<Temporal>(payload_); }

void CellValue::set_unit(std::optional<std::string> unit) {
    if (is_null() && unit.has_value()) {
        raise(Errc::invalid_argument, "Null cells carry no unit");
    }
    unit_ = std::move(unit);
}

std::string CellValue::to_text() const {
    std::string body;
    switch (kind()) {
    case ValueKind::null:
        return "";
    case ValueKind::boolean:
        body = as_bool() ? "true" : "false";
        break;
    case ValueKind::integer:
        body = std::to_string(as_integer());
        break;
    case ValueKind::real: {
        body = std::format("{}", std::get<double>(payload_));
        // Keep Real renderings lexically real so they never re-read as Integer.
        if (body.find('.') == std::string::npos && body.find('e') == std::string::npos &&
            body.find('E') == std::string::npos && body.find("inf") == std::string::npos &&
            body.find("nan") == std::string::npos) {
            body += ".0";
        }
        break;
    }
    case ValueKind::text:
        body = as_text();
        break;
    case ValueKind::temporal:
        body = as_temporal().iso;
        break;
    }
    if (unit_ && *unit_ == "%") {
        body += "%";
    }
    return body;
}

std::string_view trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) {
        --end;
    }
    return text.substr(begin, end - begin);
}

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return false;
        }
    }
    return true;
}

bool parse_integer(std::string_view s, std::int64_t& out) {
    if (s.empty()) {
        return false;
    }
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') {
        ++first; // from_chars accepts '-' but not '+'
        if (first == last) {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

bool parse_real(std::string_view s, double& out) {
    if (s.empty()) {
        return false;
    }
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') {
        ++first;
        if (first == last) {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

bool is_year(std::string_view s) {
    if (s.size() != 4 || !all_digits(s)) {
        return false;
    }
    return s[0] == '1' || s[0] == '2';
}

bool is_iso_date(std::string_view s) {
    // yyyy-mm-dd
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        return false;
    }
    if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)) ||
        !all_digits(s.substr(8, 2))) {
        return false;
    }
    int month = (s[5] - '0') * 10 + (s[6] - '0');
    int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

} // namespace

CellValue infer_value(std::string_view raw) {
    std::string_view s = trim(raw);
    if (s.empty()) {
        return CellValue::null();
    }
    if (is_year(s) || is_iso_date(s)) {
        return CellValue::temporal(std::string(s));
    }
    std::int64_t i = 0;
    if (parse_integer(s, i)) {
        return CellValue::integer(i);
    }
    double d = 0;
    if (parse_real(s, d)) {
        return CellValue::real(d);
    }
    if (s.size() > 1 && s.back() == '%') {
        std::string_view head = trim(s.substr(0, s.size() - 1));
        if (parse_real(head, d)) {
            return CellValue::real(d, "%");
        }
    }
    return CellValue::text(std::string(s));
}

} // namespace tre
