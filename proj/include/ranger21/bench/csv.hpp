#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ranger21/bench/runner.hpp"

namespace ranger21::bench {

inline constexpr std::string_view kRecordHeader =
    "run,optimizer,step,eta_t,loss,accuracy,clip_ratio,mean_vhat,decay_norm";
inline constexpr std::string_view kSummaryHeader =
    "run,optimizer,preset,initial_loss,final_loss,best_loss,final_accuracy,steps_to_threshold,"
    "diverged,diverged_at,steps_completed";

/// Curve CSV: one row per record in the given order, floats with 17
/// significant digits, empty accuracy for non-classification problems.
std::string records_to_csv(std::span<const RunRecord> records);

/// Inverse of records_to_csv; throws std::runtime_error with a line number on bad input.
std::vector<RunRecord> records_from_csv(std::string_view text);

std::string summaries_to_csv(std::span<const RunSummary> summaries);

/// Writes text to path, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Reads a whole file. Throws IoError.
std::string read_text_file(const std::filesystem::path& path);

/// records_to_csv + write_text_file.
void emit_csv(std::span<const RunRecord> records, const std::filesystem::path& path);

}  // namespace ranger21::bench
