#include "ranger21/bench/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "ranger21/numfmt.hpp"

namespace ranger21::bench {
namespace {

std::string opt_double(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

template <typename Int>
std::string opt_int(const std::optional<Int>& x) { return x ? std::to_string(*x) : ""; }

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <typename Int>
Int parse_int(std::string_view s) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::string records_to_csv(std::span<const RunRecord> records) {
    std::string out(kRecordHeader);
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.run);
        out += ',';
        out += r.optimizer;
        out += ',';
        out += std::to_string(r.step);
        for (const std::string& f :
             {format_double(r.eta_t), format_double(r.loss), opt_double(r.accuracy),
              format_double(r.clip_ratio), format_double(r.mean_vhat), format_double(r.decay_norm)}) {
            out += ',';
            out += f;
        }
        out += '\n';
    }
    return out;
}

std::vector<RunRecord> records_from_csv(std::string_view text) {
    std::vector<RunRecord> records;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kRecordHeader) {
                throw std::runtime_error("line 1: unexpected header '" + std::string(line) + "'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 9) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected 9 fields, got " +
                                     std::to_string(f.size()));
        }
        try {
            RunRecord r;
            r.run = parse_int<std::size_t>(f[0]);
            r.optimizer = std::string(f[1]);
            r.step = parse_int<std::int64_t>(f[2]);
            r.eta_t = parse_double(f[3]);
            r.loss = parse_double(f[4]);
            if (!f[5].empty()) {
                r.accuracy = parse_double(f[5]);
            }
            r.clip_ratio = parse_double(f[6]);
            r.mean_vhat = parse_double(f[7]);
            r.decay_norm = parse_double(f[8]);
            records.push_back(std::move(r));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (line_no == 0) {
        throw std::runtime_error("empty input: missing header");
    }
    return records;
}

std::string summaries_to_csv(std::span<const RunSummary> summaries) {
    std::string out(kSummaryHeader);
    out += '\n';
    for (const auto& s : summaries) {
        out += std::to_string(s.run) + ',' + s.optimizer + ',' + std::string(preset_name(s.preset)) +
               ',' + format_double(s.initial_loss) + ',' + opt_double(s.final_loss) + ',' +
               opt_double(s.best_loss) + ',' + opt_double(s.final_accuracy) + ',' +
               opt_int(s.steps_to_threshold) + ',' + (s.diverged ? "1" : "0") + ',' +
               opt_int(s.diverged_at) + ',' + std::to_string(s.steps_completed) + '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                          ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) {
        throw IoError("write to " + path.string() + " failed");
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit_csv(std::span<const RunRecord> records, const std::filesystem::path& path) {
    write_text_file(path, records_to_csv(records));
}

}  // namespace ranger21::bench
