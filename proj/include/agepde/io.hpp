// CSV and report output with fixed formatting so identical inputs produce
// byte-identical files.
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace agepde::io {

std::string format_double(double v);

// rows[i] is one line; all rows must match the header arity.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

// Matplotlib script reading summary.csv next to it.
void write_summary_plot_script(const std::filesystem::path& dir);

}  // namespace agepde::io
