#include "agora_cli/reference_tables.hpp"

#include <array>

namespace agora::cli {

namespace {

constexpr std::string_view kTT = "TherapyTalk";
constexpr std::string_view kCC = "Counsel Chat";

constexpr std::array<MetricTableRow, 32> kMetricRows{{
    {kTT, "GPT-4.0", "SA", 24.52, 15.86, 94.79, 33.28, 26.23},
    {kTT, "GPT-4.0", "SAA", 24.23, 16.51, 94.71, 33.59, 26.69},
    {kTT, "GPT-4.0", "MAA", 25.27, 16.94, 94.70, 34.35, 27.48},
    {kTT, "GPT-4.0", "MentalAgora", 28.59, 16.50, 95.31, 35.56, 28.28},
    {kTT, "GPT-3.5-turbo", "SA", 21.18, 15.09, 94.83, 31.18, 24.19},
    {kTT, "GPT-3.5-turbo", "SAA", 21.38, 15.34, 94.45, 31.41, 24.48},
    {kTT, "GPT-3.5-turbo", "MAA", 22.95, 15.25, 94.77, 32.13, 25.06},
    {kTT, "GPT-3.5-turbo", "MentalAgora", 26.50, 15.73, 94.80, 34.06, 26.82},
    {kTT, "LLAMA-2-13b", "SA", 21.11, 15.36, 93.25, 31.15, 24.35},
    {kTT, "LLAMA-2-13b", "SAA", 10.52, 15.01, 94.08, 24.58, 17.41},
    {kTT, "LLAMA-2-13b", "MAA", 18.70, 15.52, 94.59, 30.17, 23.35},
    {kTT, "LLAMA-2-13b", "MentalAgora", 26.49, 15.65, 94.61, 33.98, 26.73},
    {kTT, "MentalAlpaca", "SA", 18.42, 15.33, 94.96, 29.93, 23.07},
    {kTT, "MentalAlpaca", "SAA", 8.49, 13.65, 95.12, 22.26, 14.88},
    {kTT, "MentalAlpaca", "MAA", 18.70, 15.52, 94.59, 30.17, 23.35},
    {kTT, "MentalAlpaca", "MentalAgora", 20.65, 15.90, 94.97, 31.48, 24.62},
    {kCC, "GPT-4.0", "SA", 18.35, 14.43, 94.16, 32.58, 23.69},
    {kCC, "GPT-4.0", "SAA", 18.05, 14.47, 94.20, 32.45, 23.62},
    {kCC, "GPT-4.0", "MAA", 19.48, 15.36, 95.32, 34.45, 25.42},
    {kCC, "GPT-4.0", "MentalAgora", 19.53, 15.40, 95.14, 34.45, 25.45},
    {kCC, "GPT-3.5-turbo", "SA", 15.99, 14.08, 94.04, 29.18, 20.63},
    {kCC, "GPT-3.5-turbo", "SAA", 15.04, 13.77, 94.14, 28.55, 19.83},
    {kCC, "GPT-3.5-turbo", "MAA", 18.83, 14.30, 94.19, 31.65, 22.78},
    {kCC, "GPT-3.5-turbo", "MentalAgora", 19.14, 14.87, 94.22, 32.00, 23.10},
    {kCC, "LLAMA-2-13b", "SA", 10.98, 13.95, 93.99, 28.28, 19.50},
    {kCC, "LLAMA-2-13b", "SAA", 8.76, 12.80, 94.06, 26.22, 15.91},
    {kCC, "LLAMA-2-13b", "MAA", 16.35, 14.27, 94.15, 31.17, 21.92},
    {kCC, "LLAMA-2-13b", "MentalAgora", 17.74, 14.29, 94.21, 32.00, 23.00},
    {kCC, "MentalAlpaca", "SA", 10.74, 14.36, 93.22, 27.89, 19.29},
    {kCC, "MentalAlpaca", "SAA", 9.28, 12.52, 93.29, 25.76, 16.88},
    {kCC, "MentalAlpaca", "MAA", 12.36, 13.43, 94.18, 29.58, 20.08},
    {kCC, "MentalAlpaca", "MentalAgora", 18.89, 14.47, 94.44, 32.54, 23.54},
}};

constexpr std::array<AblationTableRow, 7> kAblationRows{{
    {"MentalAgora", -0.01, -0.03, +0.02, 0.06},
    {"- Reframing", -0.17, +0.20, -0.02, 0.39},
    {"- Solution", +0.10, -0.33, +0.09, 0.52},
    {"- Regard", +0.29, +0.26, -0.51, 1.06},
    {"Reframing only", +0.63, -0.14, +0.05, 0.69},
    {"Solution only", -0.31, +0.40, -0.03, 0.74},
    {"Regard only", -0.08, +0.10, +0.10, 0.28},
}};

}  // namespace

std::span<const MetricTableRow> metric_table() { return kMetricRows; }
std::span<const AblationTableRow> ablation_table() { return kAblationRows; }

}  // namespace agora::cli
