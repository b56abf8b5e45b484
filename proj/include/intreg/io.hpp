#pragma once

#include <intreg/error.hpp>
#include <intreg/interval.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace intreg {

/// midspr: mid_y, spr_y, mid_x1, spr_x1, ...
/// infsup: inf_y, sup_y, inf_x1, sup_x1, ...
enum class Format { MidSpr, InfSup };

constexpr std::string_view to_string(Format f) noexcept
{
    return f == Format::MidSpr ? "midspr" : "infsup";
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

inline bool parse_double(std::string_view s, double& out)
{
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Variable names from a header, checking the pairwise prefix layout.
inline std::vector<std::string> parse_header(std::string_view line, Format format)
{
    const auto cells = split_csv(line);
    const std::string_view lo = format == Format::MidSpr ? "mid_" : "inf_";
    const std::string_view hi = format == Format::MidSpr ? "spr_" : "sup_";
    if (cells.size() < 4 || cells.size() % 2 != 0)
        fail(ErrorCode::MalformedHeader, "expected an even number of columns, at least 4; got " +
                                             std::to_string(cells.size()));
    std::vector<std::string> names;
    for (std::size_t c = 0; c < cells.size(); c += 2) {
        const auto a = cells[c], b = cells[c + 1];
        if (!a.starts_with(lo) || !b.starts_with(hi) || a.size() == lo.size() ||
            a.substr(lo.size()) != b.substr(hi.size()))
            fail(ErrorCode::MalformedHeader, "columns " + std::to_string(c + 1) + "-" + std::to_string(c + 2) +
                                                 " must read " + std::string(lo) + "NAME," + std::string(hi) +
                                                 "NAME; got '" + std::string(a) + "," + std::string(b) + "'");
        names.emplace_back(a.substr(lo.size()));
    }
    return names;
}

} // namespace detail

/// Parse a CSV sample. The first column pair is the response.
inline IntervalSample read_sample(std::istream& in, Format format)
{
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<std::string> names;
    std::vector<Interval> y, x;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        if (!have_header) {
            names = detail::parse_header(line, format);
            have_header = true;
            continue;
        }
        const auto cells = detail::split_csv(line);
        if (cells.size() != 2 * names.size())
            fail(ErrorCode::NonNumericCell, "row " + std::to_string(line_no) + ": expected " +
                                                std::to_string(2 * names.size()) + " cells, got " +
                                                std::to_string(cells.size()));
        for (std::size_t v = 0; v < names.size(); ++v) {
            double a = 0.0, b = 0.0;
            for (std::size_t h = 0; h < 2; ++h) {
                const auto col = 2 * v + h;
                if (!detail::parse_double(cells[col], h == 0 ? a : b))
                    fail(ErrorCode::NonNumericCell, "row " + std::to_string(line_no) + ", col " +
                                                        std::to_string(col + 1) + ": '" + std::string(cells[col]) +
                                                        "'");
            }
            const bool inverted = format == Format::MidSpr ? b < 0.0 : a > b;
            if (inverted)
                fail(ErrorCode::InvertedInterval, "row " + std::to_string(line_no) + ", variable " + names[v]);
            const Interval iv = format == Format::MidSpr ? Interval(a, b) : Interval::from_endpoints(a, b);
            (v == 0 ? y : x).push_back(iv);
        }
    }
    if (!have_header)
        fail(ErrorCode::EmptyFile, "no header row");
    if (y.empty())
        fail(ErrorCode::EmptyFile, "header present but no data rows");
    const std::size_t k = names.size() - 1;
    return IntervalSample(std::move(y), std::move(x), k, std::move(names));
}

inline IntervalSample ingest(const std::string& path, Format format)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::IoError, "cannot open '" + path + "'");
    return read_sample(in, format);
}

inline void write_sample(std::ostream& out, const IntervalSample& s, Format format)
{
    const char* lo = format == Format::MidSpr ? "mid_" : "inf_";
    const char* hi = format == Format::MidSpr ? "spr_" : "sup_";
    for (std::size_t v = 0; v < s.names().size(); ++v)
        out << (v ? "," : "") << lo << s.names()[v] << ',' << hi << s.names()[v];
    out << '\n';
    auto cell = [&](const Interval& iv, bool first) {
        const double a = format == Format::MidSpr ? iv.mid() : iv.inf();
        const double b = format == Format::MidSpr ? iv.spr() : iv.sup();
        out << (first ? "" : ",") << detail::format_double(a) << ',' << detail::format_double(b);
    };
    for (std::size_t j = 0; j < s.n(); ++j) {
        cell(s.y(j), true);
        for (std::size_t i = 0; i < s.k(); ++i) cell(s.x(j, i), false);
        out << '\n';
    }
}

inline void write_sample(const std::string& path, const IntervalSample& s, Format format)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::IoError, "cannot write '" + path + "'");
    write_sample(out, s, format);
}

inline Format parse_format(std::string_view s)
{
    if (s == "midspr") return Format::MidSpr;
    if (s == "infsup") return Format::InfSup;
    fail(ErrorCode::InvalidArgument, "unknown format '" + std::string(s) + "'");
}

} // namespace intreg
