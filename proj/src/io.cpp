#include "pgkit/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pgkit/errors.hpp"

namespace pgkit {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open " + path + " for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path + " for reading");
    return in;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_field_double(const std::string& field, const std::string& path, std::size_t row) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw Error("io", path + ": row " + std::to_string(row) + ": bad number '" + field + "'");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_data_csv(const std::string& path, const Trajectory& states,
                    const ObservationSeries& observations) {
    if (states.size() != observations.size())
        throw Error("io", "state and observation lengths differ");
    auto out = open_out(path);
    out << "t,x,y\n";
    for (std::size_t t = 0; t < observations.size(); ++t)
        out << (t + 1) << ',' << format_double(states[t]) << ','
            << format_double(observations[t]) << '\n';
    if (!out) throw Error("io", "write failed for " + path);
}

DataSet read_data_csv(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw Error("io", path + ": empty file");
    strip_cr(line);
    bool with_truth;
    if (line == "t,x,y")
        with_truth = true;
    else if (line == "t,y")
        with_truth = false;
    else
        throw Error("io", path + ": expected header t,x,y or t,y, got '" + line + "'");

    DataSet data;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        strip_cr(line);
        if (line.empty()) continue;
        ++row;
        const auto fields = split_commas(line);
        if (fields.size() != (with_truth ? 3u : 2u))
            throw Error("io", path + ": row " + std::to_string(row) + ": expected " +
                                  std::to_string(with_truth ? 3 : 2) + " fields, got " +
                                  std::to_string(fields.size()));
        const double t = parse_field_double(fields[0], path, row);
        if (t != static_cast<double>(row))
            throw Error("io", path + ": row " + std::to_string(row) +
                                  ": t column must run 1.." + std::to_string(row) +
                                  " consecutively");
        if (with_truth) {
            data.states.push_back(parse_field_double(fields[1], path, row));
            data.observations.push_back(parse_field_double(fields[2], path, row));
        } else {
            data.observations.push_back(parse_field_double(fields[1], path, row));
        }
    }
    if (data.observations.empty()) throw Error("io", path + ": no data rows");
    return data;
}

void write_trace_csv(const std::string& path, const Trace& trace) {
    const bool full_states =
        !trace.states.empty() && trace.states.size() == trace.iterations();
    auto out = open_out(path);
    out << "iter,Q,R";
    if (full_states) {
        const std::size_t T = trace.states.front().size();
        for (std::size_t t = 1; t <= T; ++t) out << ",x_" << t;
    }
    out << '\n';
    for (std::size_t m = 0; m < trace.iterations(); ++m) {
        out << (m + 1) << ',' << format_double(trace.q[m]) << ','
            << format_double(trace.r[m]);
        if (full_states)
            for (double x : trace.states[m]) out << ',' << format_double(x);
        out << '\n';
    }
    if (!out) throw Error("io", "write failed for " + path);
}

void write_acf_csv(const std::string& path, const std::vector<double>& values) {
    auto out = open_out(path);
    out << "lag,acf\n";
    for (std::size_t k = 0; k < values.size(); ++k)
        out << k << ',' << format_double(values[k]) << '\n';
    if (!out) throw Error("io", "write failed for " + path);
}

void write_kalman_csv(const std::string& path, const KalmanResult& result) {
    auto out = open_out(path);
    out << "t,filter_mean,filter_var,smooth_mean,smooth_var\n";
    for (std::size_t t = 0; t < result.filtered_mean.size(); ++t)
        out << (t + 1) << ',' << format_double(result.filtered_mean[t]) << ','
            << format_double(result.filtered_var[t]) << ','
            << format_double(result.smoothed_mean[t]) << ','
            << format_double(result.smoothed_var[t]) << '\n';
    if (!out) throw Error("io", "write failed for " + path);
}

void write_bench_csv(const std::string& path, const BenchReport& report) {
    auto out = open_out(path);
    out << "sampler,M,N,wall_seconds\n";
    for (const auto& cell : report.rows)
        out << cell.sampler << ',' << cell.M << ',' << cell.N << ','
            << (cell.ok() ? format_double(cell.wall_seconds) : "nan") << '\n';
    if (!out) throw Error("io", "write failed for " + path);
}

void write_bench_meta_json(const std::string& path, const BenchReport& report) {
    nlohmann::json j;
    j["cpu"] = report.cpu;
    j["threads"] = report.threads;
    j["cells"] = nlohmann::json::array();
    for (const auto& cell : report.rows) {
        nlohmann::json c;
        c["sampler"] = cell.sampler;
        c["M"] = cell.M;
        c["N"] = cell.N;
        c["status"] = cell.ok() ? "ok" : "failed";
        if (cell.ok())
            c["wall_seconds"] = cell.wall_seconds;
        else
            c["error"] = cell.error;
        j["cells"].push_back(std::move(c));
    }
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::string cpu_description() {
    std::ifstream in("/proc/cpuinfo");
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        if (line.rfind("model name", 0) == 0) {
            std::size_t start = colon + 1;
            while (start < line.size() && line[start] == ' ') ++start;
            return line.substr(start);
        }
    }
    return "unknown";
}

}  // namespace pgkit
