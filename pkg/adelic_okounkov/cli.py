# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Command line front end.

``run(argv)`` parses a subcommand, builds a ``RunConfig``, loads the model
and writes JSON and CSV artifacts to the output folder. It returns the exit
code: 0 on success, 1 when a check failed and 2 for unusable input.

Subcommands:

    * ``model validate`` - Parse a model file and print a summary
    * ``sections enum`` - Strictly small sections per level
    * ``count`` - Restricted counts per level
    * ``avol`` - Restricted volume estimate with CSV series
    * ``flag find`` - Good flags per prime
    * ``semigroup build`` - Sampled Okounkov semigroup
    * ``verify <name>`` - One family of certificates
    * ``report bundle`` - Standard suite for one model
"""

from argparse import ArgumentParser
from fractions import Fraction
import logging
import os
import random
import sys

import simplejson

from adelic_okounkov import verify
from adelic_okounkov.adelic_model import (DiagonalModel, GradedSmallSections,
                                          Section, face_label, is_nef,
                                          positive_part_integral,
                                          stable_base_locus_ss)
from adelic_okounkov.exceptions import (ConfigError, FlagError, LatticeError,
                                        ModelError, NotNefError,
                                        SectionError, VerificationError)
from adelic_okounkov.flags_valuations import find_good_flag
from adelic_okounkov.okounkov import (SCHEMA_VERSION, OkounkovBase,
                                      build_semigroup, kappa_hat,
                                      volume_estimate)
from adelic_okounkov.ui_utils import (FACE_ARGUMENTS, LEVEL_ARGUMENTS,
                                      MODEL_ARGUMENTS, OUTPUT_ARGUMENTS,
                                      PRIME_ARGUMENTS, RUN_ARGUMENTS,
                                      LevelCache, RunConfig, level_progress)

logger = logging.getLogger(__name__)

#: Exit code of a failed check
EXIT_FAILURE = 1
#: Exit code of unusable input
EXIT_USAGE = 2

#: Checks available under ``verify``
CHECKS = ("counting", "dilation", "yuan", "prop-yuan", "brunn-minkowski",
          "continuity", "nef-equality", "fujita", "baselocus", "homogeneity",
          "kkok", "w-ample", "zhang-moriwaki")

_COMMON = [MODEL_ARGUMENTS, LEVEL_ARGUMENTS, FACE_ARGUMENTS, OUTPUT_ARGUMENTS,
           RUN_ARGUMENTS]


def _face_name(face):
    return "face-" + "-".join(str(j) for j in face)


def _write_json(config, name, data):
    os.makedirs(config.output, exist_ok=True)
    path = os.path.join(config.output, name)
    with open(path, "w") as output_file:
        simplejson.dump(data, output_file, sort_keys=True, indent=2)
    return path


def _add_random_arguments(parser):
    parser.add_argument("--instances", type=int, default=500,
                        help="Number of random instances.")
    parser.add_argument("--seed", type=int, default=0,
                        help="Seed of the instance generator.")
    parser.add_argument("--output", default=".",
                        help="Folder to write reports to.")
    parser.add_argument("--verbose", action="store_true",
                        help="Log progress information.")


def build_parser():
    """Return the ``ArgumentParser`` of ``adelic_okounkov``."""
    parser = ArgumentParser(prog="adelic_okounkov",
                            description="Restricted volumes and Okounkov "
                            "semigroups of diagonal adelic models.")
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    model = commands.add_parser("model", help="Model files.")
    model_actions = model.add_subparsers(dest="action")
    model_actions.required = True
    model_actions.add_parser("validate", parents=[MODEL_ARGUMENTS,
                                                  RUN_ARGUMENTS],
                             help="Parse and summarise a model.")

    sections = commands.add_parser("sections", help="Small sections.")
    section_actions = sections.add_subparsers(dest="action")
    section_actions.required = True
    enum = section_actions.add_parser("enum", parents=_COMMON,
                                      help="Strictly small sections per "
                                      "level.")
    enum.add_argument("--non-strict", action="store_true",
                      help="Enumerate small instead of strictly small "
                      "sections.")
    enum.add_argument("--limit", type=int, default=0,
                      help="Print up to this many sections per level.")

    commands.add_parser("count", parents=_COMMON,
                        help="Count restricted strictly small sections.")
    commands.add_parser("avol", parents=_COMMON,
                        help="Estimate restricted arithmetic volumes.")

    flag = commands.add_parser("flag", help="Good flags.")
    flag_actions = flag.add_subparsers(dest="action")
    flag_actions.required = True
    find = flag_actions.add_parser("find", parents=_COMMON + [PRIME_ARGUMENTS],
                                   help="First good flag per prime.")
    find.add_argument("--avoid-level", type=int,
                      help="Avoid the sum of the small monomials of this "
                      "level.")

    semigroup = commands.add_parser("semigroup", help="Okounkov semigroups.")
    semigroup_actions = semigroup.add_subparsers(dest="action")
    semigroup_actions.required = True
    semigroup_actions.add_parser("build", parents=_COMMON + [PRIME_ARGUMENTS],
                                 help="Sample the semigroup up to m-max.")

    checks = commands.add_parser("verify", help="Certificates.")
    names = checks.add_subparsers(dest="action")
    names.required = True
    for name in ("counting", "dilation"):
        _add_random_arguments(names.add_parser(name))
    for name in CHECKS[2:]:
        check = names.add_parser(name, parents=_COMMON + [PRIME_ARGUMENTS])
        if name == "brunn-minkowski":
            check.add_argument("--other", required=True,
                               help="Model file of the second bundle.")
        elif name == "continuity":
            check.add_argument("--lambda", dest="lambdas",
                               default="-1/10,-1/20,1/20,1/10",
                               help="Comma separated twists at infinity.")
        elif name == "nef-equality":
            check.add_argument("--allow-undetermined", action="store_true",
                               help="Accept models whose nefness is "
                               "undetermined.")
        elif name == "fujita":
            check.add_argument("--grid", type=int, default=8,
                               help="Grid subdivisions per edge.")
        elif name == "homogeneity":
            check.add_argument("--a", dest="multiples", default="2,3",
                               help="Comma separated multiples.")

    report = commands.add_parser("report", help="Report bundles.")
    report_actions = report.add_subparsers(dest="action")
    report_actions.required = True
    report_actions.add_parser("bundle", parents=_COMMON + [PRIME_ARGUMENTS],
                              help="Run the standard suite on one model.")
    return parser


def _validate(model, config, args):
    again = DiagonalModel.loads(model.dumps())
    if again != model:
        raise ModelError("Model does not survive a round trip.")
    verdict = is_nef(model)
    print("P^{} with O({}), places {}".format(
        model.dim, model.degree, [str(p) for p in model.places] or "none"))
    print("Nef: {} ({})".format(verdict.status, verdict.reason))
    print("Digest: {}".format(model.digest()))
    return 0


def _sections(model, config, args):
    data = []
    for face in config.face_list(model):
        for level in config.levels:
            sections = GradedSmallSections(model, level, face,
                                           strict=not args.non_strict)
            count = sections.count()
            print("m={} face {}: {} sections, {} small monomials".format(
                level, face_label(face, model.dim),
                count.count if count.exact else "~e^{:.6g}".format(
                    count.log_central), sections.dimension))
            if args.limit and count.exact:
                for i, section in zip(range(args.limit), sections.sections()):
                    print("    {}".format(section))
            data.append({"m": level, "face": list(face),
                         "small_monomials": [list(a) for a in
                                             sections.small_monomials],
                         "count": count.as_dict()})
    _write_json(config, "sections.json", {"schema_version": SCHEMA_VERSION,
                                          "levels": data})
    return 0


def _count(model, config, args):
    data = []
    for face in config.face_list(model):
        for level in config.levels:
            count = GradedSmallSections(model, level, face).count()
            print("m={} face {}: {!r}".format(level,
                                               face_label(face, model.dim),
                                               count))
            entry = {"m": level, "face": list(face)}
            entry.update(count.as_dict())
            data.append(entry)
    _write_json(config, "counts.json", {"schema_version": SCHEMA_VERSION,
                                        "counts": data})
    return 0


def _volume_report(model, config, face):
    print("Counting {} levels on face {}...".format(
        len(config.levels), face_label(face, model.dim)))
    progress, advance = level_progress(len(config.levels))
    report = volume_estimate(model, face, config.levels,
                             extrapolate_estimate=config.extrapolate,
                             jobs=config.jobs,
                             cache=LevelCache.from_environment(),
                             progress=advance)
    progress.finish()
    os.makedirs(config.output, exist_ok=True)
    stem = os.path.join(config.output, "avol_" + _face_name(face))
    report.save_csv(stem + ".csv")
    report.save_json(stem + ".json")
    return report, [stem + ".csv", stem + ".json"]


def _avol(model, config, args):
    for face in config.face_list(model):
        report, _ = _volume_report(model, config, face)
        print("avol on face {}: {:.6g} (raw {:.6g}, interval [{:.6g}, "
              "{:.6g}])".format(face_label(face, model.dim), report.avol,
                                report.raw, *report.interval))
    return 0


def _avoid_section(model, face, level):
    sections = GradedSmallSections(model, level, face)
    terms = {alpha: scale for alpha, scale in
             zip(sections.monomials, sections.scales)
             if alpha in sections.small_monomials}
    return Section(level, terms) if terms else None


def _flags(model, config, args):
    found = []
    for face in config.face_list(model):
        avoid = None
        if args.avoid_level:
            avoid = _avoid_section(model, face, args.avoid_level)
        for prime in config.primes:
            flag = find_good_flag(model, face, avoid, prime)
            print("p={} face {}: {}".format(prime, face_label(face, model.dim),
                                           flag))
            found.append({"p": prime, "face": list(face),
                          "flag": flag.to_json() if flag else None})
    _write_json(config, "flags.json", {"schema_version": SCHEMA_VERSION,
                                       "flags": found})
    return 0


def _semigroup(model, config, args):
    samples = []
    for face in config.face_list(model):
        for prime in config.primes:
            flag = find_good_flag(model, face, None, prime)
            sample = build_semigroup(model, face, flag, config.m_max)
            base = OkounkovBase(sample)
            data = sample.to_json()
            data["kappa_hat"] = kappa_hat(model, face, config.m_max)
            data["base_volume"] = base.normalized_volume()
            print("p={} face {}: rank {}, index {}, base volume {:.6g}".format(
                prime, face_label(face, model.dim), sample.rank, sample.index,
                data["base_volume"]))
            samples.append(data)
    _write_json(config, "semigroups.json",
                {"schema_version": SCHEMA_VERSION, "samples": samples})
    return 0


def _run_checks(model, config, args):
    """Return the certificates of ``verify <args.action>``."""
    name = args.action
    faces = config.face_list(model) if model is not None else []
    certificates = []
    if name in ("counting", "dilation"):
        rng = random.Random(args.seed)
        for _ in range(args.instances):
            if name == "counting":
                certificates.append(verify.check_counting_lemma(
                    *verify.random_counting_instance(rng)))
            else:
                certificates.append(verify.check_dilation_lemma(
                    *verify.random_dilation_instance(rng)))
    elif name == "yuan":
        for face in faces:
            for prime in config.primes:
                flag = find_good_flag(model, face, None, prime)
                for level in config.levels:
                    certificates.append(verify.check_yuan_theorem(
                        model, face, flag, level))
    elif name in ("prop-yuan", "kkok"):
        for face in faces:
            for prime in config.primes:
                flag = find_good_flag(model, face, None, prime)
                if name == "kkok":
                    certificates.append(verify.check_kkok(
                        model, face, flag, config.levels, config.tolerance))
                else:
                    certificates.append(verify.check_prop_yuan(
                        model, face, flag, config.levels))
    elif name == "brunn-minkowski":
        other = DiagonalModel.load(args.other)
        for face in faces:
            certificates.append(verify.check_brunn_minkowski(
                model, other, face, config.levels, config.primes[0]))
    elif name == "continuity":
        lambdas = [Fraction(x) for x in args.lambdas.split(",") if x.strip()]
        for face in faces:
            certificates.append(verify.check_continuity(
                model, face, lambdas, config.levels))
    elif name == "nef-equality":
        for face in faces:
            certificates.append(verify.check_nef_equality(
                model, face, config.levels, config.tolerance,
                args.allow_undetermined))
    elif name == "fujita":
        for face in faces:
            certificates.append(verify.fujita_lower_bound(
                model, face, config.levels, args.grid, config.tolerance))
    elif name == "baselocus":
        certificates.append(verify.check_baselocus_duality(model,
                                                           config.m_max))
    elif name == "homogeneity":
        multiples = [int(a) for a in args.multiples.split(",")]
        for face in faces:
            certificates.append(verify.check_homogeneity(
                model, face, multiples, config.m_max))
    elif name == "w-ample":
        certificates.append(verify.check_w_ample_openness(model,
                                                          config.m_max))
    elif name == "zhang-moriwaki":
        certificates.append(verify.check_zhang_moriwaki(model, config.m_max))
    return certificates


def _save_certificates(config, certificates, prefix=""):
    os.makedirs(config.output, exist_ok=True)
    paths = []
    for i, certificate in enumerate(certificates):
        path = os.path.join(config.output, "{}{}_{:03d}.json".format(
            prefix, certificate.check, i))
        certificate.save(path)
        paths.append(path)
    return paths


def _verify(model, config, args):
    certificates = _run_checks(model, config, args)
    _save_certificates(config, certificates)
    for certificate in certificates:
        logger.info("%s: %s", certificate.check, certificate.status)
    counts = {}
    for certificate in certificates:
        counts[certificate.status] = counts.get(certificate.status, 0) + 1
    print("{} certificates: {}".format(len(certificates), ", ".join(
        "{} {}".format(n, status) for status, n in sorted(counts.items()))))
    return verify.exit_status(certificates)


def _bundle(model, config, args):
    """Counts, volume report and every applicable certificate."""
    files = []
    skipped = {}
    certificates = []
    whole = model.check_face(None)
    report, paths = _volume_report(model, config, whole)
    files.extend(os.path.basename(p) for p in paths)
    prime = config.primes[0]
    suite = [
        ("baselocus", lambda: verify.check_baselocus_duality(model,
                                                             config.m_max)),
        ("zhang-moriwaki", lambda: verify.check_zhang_moriwaki(
            model, config.m_max)),
        ("w-ample", lambda: verify.check_w_ample_openness(model,
                                                          config.m_max)),
        ("homogeneity", lambda: verify.check_homogeneity(
            model, whole, (2, 3), min(config.m_max, 8))),
        ("yuan", lambda: verify.check_yuan_theorem(
            model, whole, find_good_flag(model, whole, None, prime),
            min(config.levels))),
        ("prop-yuan", lambda: verify.check_prop_yuan(
            model, whole, find_good_flag(model, whole, None, prime),
            config.levels)),
        ("nef-equality", lambda: verify.check_nef_equality(
            model, whole, config.levels, config.tolerance)),
        ("fujita", lambda: verify.fujita_lower_bound(
            model, whole, config.levels, 8, config.tolerance)),
    ]
    for name, check in suite:
        try:
            certificates.append(check())
        except (VerificationError, NotNefError, FlagError) as error:
            logger.info("Skipping %s: %s", name, error)
            skipped[name] = str(error)
    paths = _save_certificates(config, certificates, prefix="certificate_")
    files.extend(os.path.basename(p) for p in paths)
    index = {"schema_version": SCHEMA_VERSION, "model": model.to_json(),
             "model_digest": model.digest(), "files": files,
             "skipped": skipped,
             "positive_part_integral": positive_part_integral(model),
             "stable_base_locus": stable_base_locus_ss(
                 model, config.m_max).to_json(),
             "avol": report.avol,
             "certificates": {os.path.basename(p): c.status
                              for p, c in zip(paths, certificates)}}
    _write_json(config, "index.json", index)
    print("Wrote {} files and index.json to {}".format(len(files),
                                                       config.output))
    return verify.exit_status(certificates)


_HANDLERS = {("model", "validate"): _validate,
             ("sections", "enum"): _sections,
             ("count", None): _count,
             ("avol", None): _avol,
             ("flag", "find"): _flags,
             ("semigroup", "build"): _semigroup,
             ("report", "bundle"): _bundle}


def run(argv=None):
    """Run the command line and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False)
                        else logging.WARNING)
    try:
        config = RunConfig.from_arguments(args)
        model = None
        if getattr(args, "model", None):
            model = DiagonalModel.load(args.model)
        if args.command == "verify":
            return _verify(model, config, args)
        handler = _HANDLERS[(args.command, getattr(args, "action", None))]
        return handler(model, config, args)
    except (ModelError, ConfigError, FlagError, VerificationError,
            LatticeError, SectionError, OSError) as error:
        print("adelic_okounkov: error: {}".format(error), file=sys.stderr)
        return EXIT_USAGE
