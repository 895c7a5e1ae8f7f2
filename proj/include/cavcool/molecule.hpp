#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cavcool/units.hpp"
#include "cavcool/vibrational.hpp"

namespace cavcool {

class EmptyBasis : public Error {
public:
    using Error::Error;
};

struct ExcitedState {
    std::string label;
    double T_e = 0.0;        // cm^-1, well bottom above the ground-well bottom
    double linewidth = 0.0;  // Gamma, rad/s
    double omega_e = 0.0;    // cm^-1
    double omega_e_x_e = 0.0;
    double r_e = 0.0;        // A
    double rabi_scale = 1.0; // Omega^2 relative to the reference laser coupling
};

struct MoleculeSpec {
    std::string name;
    double reduced_mass = 0.0;  // amu
    double total_mass = 0.0;    // amu
    double B_e = 0.0;           // cm^-1
    double B_ex1 = 0.0;
    double B_ex2 = 0.0;
    double D_J = 0.0;
    double omega_e = 0.0;
    std::optional<double> omega_e_x_e;
    double r_e = 0.0;  // A
    std::string ground_state_label;
    double spin_orbit_splitting = 0.0;  // cm^-1, metadata only
    std::vector<ExcitedState> excited_states;

    void validate() const;
    // B(v) = B_e + B_ex1 (v + 1/2) + B_ex2 (v + 1/2)^2, cm^-1
    double rotational_constant(int v) const;
};

MoleculeSpec read_molecule_file(const std::filesystem::path& path);
MoleculeSpec parse_molecule(const std::string& text, const std::string& origin = "<string>");

enum class Ladder { even, odd };

struct RoVibState {
    int v = 0;
    int J = 0;
    Ladder ladder = Ladder::even;
    double energy = 0.0;  // rad/s above (v=0, J=0)

    std::string label() const;  // "v0:J3"
};

struct RoVibBasis {
    MoleculeSpec molecule;
    std::vector<RoVibState> states;
    int v_max = 0;
    int J_max = 0;
    double zero_point = 0.0;  // rad/s, (v=0, J=0) above the ground-well bottom
    std::vector<double> vibrational_energy;  // cm^-1 above the well bottom, v = 0..v_max

    std::size_t size() const { return states.size(); }
    // Index of (v, J) or -1.
    int index_of(int v, int J) const;
};

// E_J = B(v) J(J+1) - D_J J^2 (J+1)^2, in rad/s.
double rotational_energy(const MoleculeSpec& m, int v, int J);

// Vibrational term values from the Morse levels of (omega_e, omega_e x_e), or
// the harmonic ladder when omega_e x_e is absent.
std::vector<double> default_vibrational_energies(const MoleculeSpec& m, int v_max);

// Grid wide enough for v_max levels of every Morse curve that overlaps with
// the ground state (ground plus excited states with vibrational constants).
RadialGrid default_grid(const MoleculeSpec& m, int v_max, int n_points = 512);

// vibrational_energy[v] in cm^-1 above the ground-well bottom.
RoVibBasis build_basis(const MoleculeSpec& m, int v_max, int J_max, std::vector<double> vibrational_energy);
RoVibBasis build_basis(const MoleculeSpec& m, int v_max, int J_max);

// P ~ g exp(-E / k_B T), g = 2J+1 when degeneracy is on. T == 0 returns the
// zero-temperature limit (all weight on the lowest state).
std::vector<double> boltzmann_weights(const RoVibBasis& b, double temperature_K, bool degeneracy = true);

// Thermal rotational distribution restricted to one vibrational level.
std::vector<double> rotational_thermal_in_v(const RoVibBasis& b, int v, double temperature_K, bool degeneracy = true);

}  // namespace cavcool
