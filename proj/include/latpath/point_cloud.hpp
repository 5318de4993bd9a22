#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace latpath {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct AtomLabel {
    std::string atom;     // atom name, trimmed (e.g. "CA")
    std::string residue;  // residue name + sequence number (e.g. "ALA 42")
    char chain = ' ';
};

struct PointCloud {
    std::vector<Point3> points;
    std::vector<AtomLabel> labels;  // empty, or one label per point
    std::string source;

    std::size_t size() const { return points.size(); }
};

struct AtomSelection {
    enum class Mode { AllAtoms, Chain, CAlphaOnly };

    Mode mode = Mode::AllAtoms;
    char chain = ' ';

    static AtomSelection all() { return {}; }
    static AtomSelection calpha() { return {Mode::CAlphaOnly, ' '}; }
    static AtomSelection for_chain(char id) { return {Mode::Chain, id}; }

    std::string describe() const;
};

// Fixed-column PDB reader. Keeps ATOM records only (HETATM excluded) with
// alternate-location indicator ' ' or 'A'; x,y,z live in columns 31-38,
// 39-46, 47-54. Malformed coordinates raise ParseError naming the line;
// an empty selection raises DataError.
PointCloud parse_pdb(std::istream& in, const AtomSelection& sel,
                     std::string source_name = "");

// Plain-text x,y,z rows, comma separated. '#' starts a comment, blank lines
// are skipped. Anything else that does not parse as three reals raises
// ParseError naming the line.
PointCloud parse_xyz_csv(std::istream& in, std::string source_name = "");

// Adds independent uniform noise from [-sigma, sigma] to every coordinate.
// Deterministic for a fixed seed.
PointCloud jittered(const PointCloud& cloud, double sigma, std::uint64_t seed);

}  // namespace latpath
