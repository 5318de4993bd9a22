#include "latpath/svg.hpp"

#include <ostream>

#include "latpath/errors.hpp"

namespace latpath {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 40.0;

double px(double t) { return kMargin + t * (kWidth - 2 * kMargin); }
double py(double v) { return kHeight - kMargin - v * (kHeight - 2 * kMargin); }

}  // namespace

void write_step_svg(std::ostream& out, const StepFunction& f) {
    const std::size_t q = f.q();
    if (q == 0) throw DataError("cannot plot an empty step function");

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    out << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\""
        << px(1) << "\" y2=\"" << py(0)
        << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
    out << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\""
        << px(0) << "\" y2=\"" << py(1)
        << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";

    out << "  <polyline id=\"phi\" fill=\"none\" stroke=\"#1f6feb\" "
           "stroke-width=\"2\" points=\"";
    const double inv_q = 1.0 / static_cast<double>(q);
    out << px(0.0) << "," << py(0.0);
    for (std::size_t j = 0; j < q; ++j) {
        const double t = f.breakpoints[j];
        const double before = static_cast<double>(j) * inv_q;
        const double after = static_cast<double>(j + 1) * inv_q;
        out << " " << px(t) << "," << py(before);
        out << " " << px(t) << "," << py(after);
    }
    out << " " << px(1.0) << "," << py(1.0);
    out << "\"/>\n";
    out << "</svg>\n";
}

}  // namespace latpath
