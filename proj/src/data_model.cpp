#include "survhc/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "survhc/error.hpp"

namespace survhc {

namespace {

std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        auto comma = line.find(',', start);
        auto field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        auto b = field.find_first_not_of(" \t");
        auto e = field.find_last_not_of(" \t");
        fields.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

double parse_real(const std::string& s, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ParseError(line, "not a number: '" + s + "'");
    }
    return v;
}

std::int64_t parse_count(const std::string& s, std::size_t line) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(line, "not an integer: '" + s + "'");
    }
    return v;
}

}  // namespace

std::size_t SurvivalDataset::count(Group g) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(subjects.begin(), subjects.end(), [g](const SubjectRecord& s) { return s.group == g; }));
}

IntervalTable IntervalTable::swapped() const {
    IntervalTable out;
    out.n_x_prev = n_y_prev;
    out.n_y_prev = n_x_prev;
    out.o_x = o_y;
    out.o_y = o_x;
    out.c_x = c_y;
    out.c_y = c_x;
    return out;
}

void IntervalTable::validate() const {
    const auto T = intervals();
    if (T == 0) throw ValidationError("interval table is empty");
    for (const auto* v : {&n_y_prev, &o_x, &o_y, &c_x, &c_y}) {
        if (v->size() != T) throw ValidationError("interval table columns differ in length");
    }
    for (std::size_t t = 0; t < T; ++t) {
        const auto label = std::to_string(t + 1);
        if (n_x_prev[t] < 0 || n_y_prev[t] < 0 || o_x[t] < 0 || o_y[t] < 0 || c_x[t] < 0 || c_y[t] < 0) {
            throw ValidationError("negative count at t=" + label);
        }
        if (o_x[t] + c_x[t] > n_x_prev[t]) {
            throw ValidationError("o_x + c_x exceeds n_x_prev at t=" + label);
        }
        if (o_y[t] + c_y[t] > n_y_prev[t]) {
            throw ValidationError("o_y + c_y exceeds n_y_prev at t=" + label);
        }
        if (t + 1 < T && (n_x_prev[t + 1] != n_x_after(t) || n_y_prev[t + 1] != n_y_after(t))) {
            throw ValidationError("at-risk counts inconsistent between t=" + label + " and t=" +
                                  std::to_string(t + 2));
        }
    }
}

SurvivalDataset parse_subjects(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!blank(line)) break;
    }
    if (lineno == 0 || blank(line)) throw ParseError(lineno == 0 ? 1 : lineno, "missing header");
    if (split_csv_line(line) != std::vector<std::string>{"time", "status", "group"}) {
        throw ParseError(lineno, "expected header 'time,status,group'");
    }

    SurvivalDataset data;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        auto f = split_csv_line(line);
        if (f.size() != 3) throw ParseError(lineno, "expected 3 fields, got " + std::to_string(f.size()));

        SubjectRecord rec;
        rec.time = parse_real(f[0], lineno);
        if (rec.time < 0) throw ValidationError("negative time on line " + std::to_string(lineno));

        if (f[1] == "1" || f[1] == "event") {
            rec.status = Status::event;
        } else if (f[1] == "0" || f[1] == "censored") {
            rec.status = Status::censored;
        } else {
            throw ParseError(lineno, "unknown status '" + f[1] + "'");
        }

        if (f[2] == "x") {
            rec.group = Group::x;
        } else if (f[2] == "y") {
            rec.group = Group::y;
        } else {
            throw ValidationError("unknown group label '" + f[2] + "' on line " + std::to_string(lineno));
        }
        data.subjects.push_back(rec);
    }
    if (data.subjects.empty()) throw ValidationError("dataset has no subjects");
    return data;
}

SurvivalDataset parse_subjects(const std::string& text) {
    std::istringstream in(text);
    return parse_subjects(in);
}

IntervalTable parse_intervals(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!blank(line)) break;
    }
    if (lineno == 0 || blank(line)) throw ParseError(lineno == 0 ? 1 : lineno, "missing header");

    const std::vector<std::string> base{"t", "n_x_prev", "n_y_prev", "o_x", "o_y"};
    auto header = split_csv_line(line);
    bool has_censor = false;
    if (header.size() == 7 && std::equal(base.begin(), base.end(), header.begin()) && header[5] == "c_x" &&
        header[6] == "c_y") {
        has_censor = true;
    } else if (header != base) {
        throw ParseError(lineno, "expected header 't,n_x_prev,n_y_prev,o_x,o_y[,c_x,c_y]'");
    }

    IntervalTable table;
    std::int64_t expected_t = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        auto f = split_csv_line(line);
        if (f.size() != header.size()) {
            throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields, got " +
                                         std::to_string(f.size()));
        }
        auto t = parse_count(f[0], lineno);
        if (t != expected_t) {
            throw ParseError(lineno, "expected t=" + std::to_string(expected_t) + ", got t=" + f[0]);
        }
        ++expected_t;
        table.n_x_prev.push_back(parse_count(f[1], lineno));
        table.n_y_prev.push_back(parse_count(f[2], lineno));
        table.o_x.push_back(parse_count(f[3], lineno));
        table.o_y.push_back(parse_count(f[4], lineno));
        if (has_censor) {
            table.c_x.push_back(parse_count(f[5], lineno));
            table.c_y.push_back(parse_count(f[6], lineno));
        }
    }
    const auto T = table.intervals();
    if (T == 0) throw ValidationError("interval table has no rows");

    if (!has_censor) {
        table.c_x.assign(T, 0);
        table.c_y.assign(T, 0);
        for (std::size_t t = 0; t + 1 < T; ++t) {
            table.c_x[t] = table.n_x_prev[t] - table.o_x[t] - table.n_x_prev[t + 1];
            table.c_y[t] = table.n_y_prev[t] - table.o_y[t] - table.n_y_prev[t + 1];
            if (table.c_x[t] < 0 || table.c_y[t] < 0) {
                throw ValidationError("at-risk counts increase or events exceed at-risk at t=" +
                                      std::to_string(t + 1));
            }
        }
    }
    table.validate();
    return table;
}

IntervalTable parse_intervals(const std::string& text) {
    std::istringstream in(text);
    return parse_intervals(in);
}

std::string render_intervals(const IntervalTable& table) {
    std::ostringstream out;
    out << "t,n_x_prev,n_y_prev,o_x,o_y,c_x,c_y\n";
    for (std::size_t t = 0; t < table.intervals(); ++t) {
        out << t + 1 << ',' << table.n_x_prev[t] << ',' << table.n_y_prev[t] << ',' << table.o_x[t] << ','
            << table.o_y[t] << ',' << table.c_x[t] << ',' << table.c_y[t] << '\n';
    }
    return out.str();
}

std::size_t bin_index(double time, double max_time, std::size_t bins) {
    if (time <= 0.0) return 1;
    // time * bins / max avoids the rounding of a precomputed width
    auto k = std::ceil(time * static_cast<double>(bins) / max_time);
    if (k < 1.0) return 1;
    if (k > static_cast<double>(bins)) return bins;
    return static_cast<std::size_t>(k);
}

IntervalTable bin_subjects(const SurvivalDataset& data, std::size_t bins) {
    if (bins == 0) throw ArgumentError("number of bins must be positive");
    if (data.subjects.empty()) throw ArgumentError("dataset is empty");

    double max_time = 0.0;
    for (const auto& s : data.subjects) max_time = std::max(max_time, s.time);
    if (max_time <= 0.0) throw ValidationError("all subject times are 0; cannot bin");

    IntervalTable table;
    for (auto* v : {&table.n_x_prev, &table.n_y_prev, &table.o_x, &table.o_y, &table.c_x, &table.c_y}) {
        v->assign(bins, 0);
    }
    // Ends per bin, then a suffix sum gives the at-risk counts.
    std::vector<std::int64_t> end_x(bins + 1, 0), end_y(bins + 1, 0);
    for (const auto& s : data.subjects) {
        auto b = bin_index(s.time, max_time, bins) - 1;
        bool event = s.status == Status::event;
        if (s.group == Group::x) {
            (event ? table.o_x : table.c_x)[b] += 1;
            end_x[b] += 1;
        } else {
            (event ? table.o_y : table.c_y)[b] += 1;
            end_y[b] += 1;
        }
    }
    std::int64_t at_risk_x = 0, at_risk_y = 0;
    for (std::size_t t = bins; t-- > 0;) {
        at_risk_x += end_x[t];
        at_risk_y += end_y[t];
        table.n_x_prev[t] = at_risk_x;
        table.n_y_prev[t] = at_risk_y;
    }
    return table;
}

KaplanMeierCurve km_curve(const IntervalTable& table) {
    KaplanMeierCurve curve;
    const auto T = table.intervals();
    if (T == 0) return curve;

    auto group_curve = [T](const std::vector<std::int64_t>& n_prev, const std::vector<std::int64_t>& o,
                           const std::vector<std::int64_t>& c) {
        std::vector<double> s(T, 0.0);
        const auto n0 = n_prev[0];
        std::int64_t censored = 0;
        bool exhausted = false;
        for (std::size_t t = 0; t < T; ++t) {
            censored += c[t];
            auto denom = n0 - censored;
            if (denom <= 0) exhausted = true;
            if (exhausted) continue;
            s[t] = static_cast<double>(n_prev[t] - o[t] - c[t]) / static_cast<double>(denom);
        }
        return s;
    };
    curve.s_x = group_curve(table.n_x_prev, table.o_x, table.c_x);
    curve.s_y = group_curve(table.n_y_prev, table.o_y, table.c_y);
    return curve;
}

}  // namespace survhc
