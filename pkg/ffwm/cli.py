"""
Command-line front end. Each subcommand reads the run configuration, computes, and writes CSV tables, SVG plots, and
a JSON manifest into the output directory.

Exit codes: 0 on success, 2 for an invalid configuration or input file, 3 for a numerical failure.
"""
from __future__ import absolute_import, division, print_function

import argparse
import logging
import os
import sys

import matplotlib

matplotlib.use('Agg')

import numpy as np

from . import __version__, beamprop, cavityqed, dispersion, see, sweeps, tables
from .base import (ConfigError, IllConditionedIntegralError, InterpolationDomainError, NoResonanceError,
                   NumericalFailure, WindowError)
from .config import load_config

logger = logging.getLogger(__name__)

log_format = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'

QUARTET_HEADER = ('m_sig', 'lambda_sig_um', 'm_A', 'lambda_A_um', 'm_B', 'lambda_B_um', 'lambda_idl_um',
                  'energy_mismatch_rad_per_s')

EFFICIENCY_HEADER = sweeps.ROW_HEADER[:-1] + ('purcell_factor', 'eta_spatial', 'eta', 'idler_linewidth_nm', 'flag')

PLANES_HEADER = ('z_um', 'w0_um', 'offset_um', 'overlap')

BEAM_HEADER = ('z_um', 'w0_um', 'offset_um', 'overlap', 'captured_fraction', 'transmission', 'eta_spatial',
               'eta_spatial_slm')

NOISE_HEADER = ('process', 'mismatch_per_um', 'coherence_length_um', 'frequency_weight', 'extrapolated',
                'lambda_1_um', 'lambda_2_um', 'lambda_3_um', 'lambda_4_um')

OUT_OF_PLANE_HEADER = ('thickness_um', 'index', 'lambda_idl_um', 'phase_rad', 'exceeds_pi')

SELFTEST_HEADER = ('set', 'M_e', 'M_sig', 'g_e', 'g_nl', 'Gamma_idl', 'eta_idler_closed', 'eta_idler_ode',
                   'max_deviation')

# Largest allowed difference between closed-form and integrated yields in the self-test.
selftest_tolerance = 1e-6

# Errors caused by the configuration or its input tables, which exit with 2.
input_errors = (ConfigError, FileNotFoundError, WindowError, InterpolationDomainError, NoResonanceError)

# Errors of the numerics, which exit with 3.
numerical_errors = (NumericalFailure, IllConditionedIntegralError)


class Run(object):
    """The parsed arguments, the configuration, and the files a command reads and writes."""

    def __init__(self, args, config):
        self.args = args
        self.config = config
        self.inputs = [p for p in (config.source, config.material_path, config.dispersion_path) if p is not None]
        self.outputs = []
        if not os.path.isdir(args.out):
            os.makedirs(args.out)

    def path(self, name):
        path = os.path.join(self.args.out, name)
        self.outputs.append(path)
        return path

    def write_rows(self, name, header, rows):
        return tables.write_rows(self.path(name), header, rows)

    def save_svg(self, name, figure):
        return see.save_svg(figure, self.path(name))

    def finish(self, command):
        tables.write_manifest(os.path.join(self.args.out, '{}_manifest.json'.format(command)), command,
                              self.config.to_dict(), inputs=self.inputs, outputs=self.outputs)
        return 0


def drive_for(config, context, budget):
    power_a, power_b = sweeps.split_budget(budget, context.pump_ratio)
    return cavityqed.PumpDrive(power_a=power_a, power_b=power_b, phase_a=config.pumps.phase_a,
                               phase_b=config.pumps.phase_b, alpha_a=context.alpha_a, alpha_b=context.alpha_b)


def cmd_phasematch(run):
    config = run.config
    material = config.material()
    curve = config.curve(material)
    quartets = dispersion.solve_fpm(curve, config.geometry.radius, config.quartet.signal[0], config.quartet.window)
    logger.info("Found %d phase-matched quartets", len(quartets))
    rows = [(q.sig.m, 1e6 * q.sig.wavelength, q.A.m, 1e6 * q.A.wavelength, q.B.m, 1e6 * q.B.wavelength,
             1e6 * q.idl.wavelength, q.energy_mismatch) for q in quartets]
    run.write_rows('quartets.csv', QUARTET_HEADER, rows)
    figure, axes = see.effective_index(curve, quartet=config.designed_quartet())
    run.save_svg('effective_index.svg', figure)
    return run.finish('phasematch')


def cmd_efficiency(run):
    config = run.config
    context = config.device_context()
    budget = config.efficiency.budget
    zpl_fraction = config.zpl_fraction()
    q_bar = config.quality.q_bar
    result = cavityqed.evaluate(context, q_bar, zpl_fraction, drive_for(config, context, budget))
    report = result.report
    estimate, _ = cavityqed.adiabatic_idler_efficiency(result.inputs)
    logger.info("Purcell factor %.4g; adiabatic estimate of the idler efficiency %.4f", result.purcell_factor,
                estimate)
    eta_idler = report.idler if config.efficiency.eta_idler is None else config.efficiency.eta_idler
    if config.efficiency.eta_idler is not None:
        logger.info("Using eta_idler = %g from the configuration instead of the computed %.4f", eta_idler,
                    report.idler)
    eta_spatial = config.efficiency.eta_spatial
    eta = sweeps.total_efficiency(eta_idler, eta_spatial)
    linewidth = cavityqed.idler_linewidth(context.quartet.idl.wavelength, context.q_idler)
    print('eta_idler = {:.6f}'.format(eta_idler))
    print('beta = {:.6f}'.format(report.beta))
    print('eta = {:.6f}'.format(eta))
    row = (q_bar, zpl_fraction, budget, result.inputs.nonlinear_coupling, eta_idler, report.beta, report.emitter,
           report.signal_loss, result.purcell_factor, eta_spatial, eta, 1e9 * linewidth, report.flag)
    run.write_rows('efficiency.csv', EFFICIENCY_HEADER, [row])
    return run.finish('efficiency')


def sweep_spec(config, context):
    settings = config.sweep
    if settings.budget_points == 1:
        budgets = (settings.budget_min,)
    else:
        budgets = sweeps.SweepSpec.logarithmic_budgets(settings.budget_min, settings.budget_max,
                                                       settings.budget_points)
    return sweeps.SweepSpec(q_values=settings.q_values, zpl_fractions=settings.zpl_fractions, budgets=budgets,
                            p_max=settings.p_max, context=context)


def cmd_sweep(run):
    spec = sweep_spec(run.config, run.config.device_context())
    rows = sweeps.sweep(spec, threads=run.args.threads)
    failures = sum(1 for row in rows if row.flag == 'numerical failure')
    if failures:
        logger.warning("%d of %d grid points failed and are flagged", failures, len(rows))
    run.write_rows('sweep.csv', sweeps.ROW_HEADER, rows)
    figure, axes = see.efficiency_vs_budget(rows)
    run.save_svg('efficiency_vs_budget.svg', figure)
    return run.finish('sweep')


def cmd_saturation(run):
    config = run.config
    settings = config.sweep
    results = sweeps.saturation_grid(settings.q_values, settings.zpl_fractions, config.device_context(),
                                     p_max=settings.p_max, threads=run.args.threads,
                                     points=settings.saturation_points)
    rows = []
    for result in results:
        ratio = sweeps.saturation_loss_ratio(result, settings.loss_ratio_eta_spatial)
        rows.append((result.q_bar, result.zpl_fraction, result.p_star, result.eta_star, result.beta_star, ratio,
                     result.at_boundary))
    run.write_rows('saturation.csv', sweeps.SATURATION_HEADER, rows)
    figure, axes = see.saturation_vs_q(results)
    run.save_svg('saturation.svg', figure)
    return run.finish('saturation')


def load_farfield(run):
    settings = run.config.beam
    if settings.farfield is None:
        logger.info("No far-field file given; using the synthetic radially polarized doughnut")
        return beamprop.radial_farfield(settings.wavelength, settings.na, width=settings.synthetic_width,
                                        samples=settings.farfield_points)
    run.inputs.append(settings.farfield)
    wavelength = None if os.path.exists(settings.farfield + '.json') else settings.wavelength
    return beamprop.read_farfield(settings.farfield, wavelength=wavelength)


def cmd_beam(run):
    settings = run.config.beam
    farfield = load_farfield(run)
    grid = beamprop.default_plane_grid(settings.plane_half_width, settings.plane_points)
    optimum = beamprop.optimize_spatial(farfield, settings.na, settings.z_values, settings.transmission, x=grid,
                                        y=grid, apply_waveplate=settings.apply_waveplate, threads=run.args.threads)
    slm = beamprop.slm_limited_efficiency(optimum.captured_fraction, settings.transmission)
    run.write_rows('beam_planes.csv', PLANES_HEADER,
                   [(1e6 * p.z, 1e6 * p.waist, 1e6 * p.offset, p.overlap) for p in optimum.planes])
    run.write_rows('beam.csv', BEAM_HEADER,
                   [(1e6 * optimum.z, 1e6 * optimum.waist, 1e6 * optimum.offset, optimum.overlap,
                     optimum.captured_fraction, settings.transmission, optimum.spatial_efficiency, slm)])
    beamprop.write_plane(run.path('best_plane.csv'), optimum.field)
    figure, axes = see.intensity_map(optimum.field)
    run.save_svg('best_plane.svg', figure)
    print('eta_spatial = {:.6f}'.format(optimum.spatial_efficiency))
    return run.finish('beam')


def cmd_noise(run):
    config = run.config
    material = config.material()
    curve = config.curve(material)
    quartet = config.designed_quartet()
    processes = dispersion.competing_process_scan(quartet, curve, config.geometry.radius, material=material,
                                                  signal_offset=config.signal_offset)
    rows = [(p.label, 1e-6 * p.mismatch, 1e6 * p.coherence_length, p.frequency_weight, p.extrapolated) +
            tuple(1e6 * w for w in p.wavelengths) for p in processes]
    run.write_rows('noise.csv', NOISE_HEADER, rows)
    index = dispersion.bulk_index(material, quartet.idl.wavelength)
    phase, flagged = dispersion.out_of_plane_phase(config.geometry, index, quartet.idl.wavelength)
    run.write_rows('out_of_plane.csv', OUT_OF_PLANE_HEADER,
                   [(1e6 * config.geometry.thickness, index, 1e6 * quartet.idl.wavelength, phase, flagged)])
    return run.finish('noise')


def random_inputs(generator):
    """Draw rates spanning two decades around 1e10 rad/s, with the idler the fastest."""
    m_e, m_sig, g_e, g_nl = 10 ** generator.uniform(9, 11, size=4)
    idler_rate = 10 ** generator.uniform(10, 12)
    return cavityqed.HamiltonianInputs(emitter_coupling=g_e, nonlinear_coupling=g_nl, emitter_loss=m_e,
                                       signal_loss=m_sig, idler_rate=idler_rate)


def cmd_selftest(run, sets=20):
    generator = np.random.default_rng(run.args.seed)
    rows = []
    worst = 0.0
    for index in range(sets):
        inputs = random_inputs(generator)
        closed = cavityqed.solve(inputs)
        emitter, lost_signal, idler = cavityqed.integrate_yields(
            cavityqed.build_matrix(inputs), (inputs.emitter_loss, inputs.signal_loss, inputs.idler_rate))
        deviation = max(abs(closed.emitter - emitter), abs(closed.signal_loss - lost_signal),
                        abs(closed.idler - idler))
        worst = max(worst, deviation)
        rows.append((index, inputs.emitter_loss, inputs.signal_loss, inputs.emitter_coupling,
                     inputs.nonlinear_coupling, inputs.idler_rate, closed.idler, idler, deviation))
    run.write_rows('selftest.csv', SELFTEST_HEADER, rows)
    run.finish('selftest')
    logger.info("Largest deviation between closed form and integration: %.3g", worst)
    if worst > selftest_tolerance:
        raise NumericalFailure("Closed-form and integrated yields differ by {:.3g}".format(worst))
    return 0


commands = {'phasematch': cmd_phasematch,
            'efficiency': cmd_efficiency,
            'sweep': cmd_sweep,
            'saturation': cmd_saturation,
            'beam': cmd_beam,
            'noise': cmd_noise,
            'selftest': cmd_selftest}


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog='ffwm', description="Model frequency conversion of single photons by "
                                                              "free-space phase-matched four-wave mixing in a ring.")
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--config', help="JSON run configuration; defaults to the shipped diamond ring example")
    parser.add_argument('--out', default='.', help="output directory")
    parser.add_argument('--threads', type=int, default=1, help="worker threads for grid points and beam planes")
    parser.add_argument('--seed', type=int, default=0, help="random seed; used only by selftest")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')
    parser.add_argument('command', choices=sorted(commands))
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level=level, format=log_format)
    if args.threads < 1:
        print("ffwm: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        config = load_config(args.config)
        return commands[args.command](Run(args, config))
    except input_errors as error:
        print('ffwm: {}'.format(error), file=sys.stderr)
        return 2
    except numerical_errors as error:
        print('ffwm: numerical failure: {}'.format(error), file=sys.stderr)
        return 3


if __name__ == '__main__':
    sys.exit(main())
