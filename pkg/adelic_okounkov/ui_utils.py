# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Utilities for easing user interaction with the ``adelic_okounkov`` package.

Variables:

    * ``MODEL_ARGUMENTS`` - ``argparse.ArgumentParser`` for the model file
    * ``LEVEL_ARGUMENTS`` - ``argparse.ArgumentParser`` for levels m
    * ``FACE_ARGUMENTS`` - ``argparse.ArgumentParser`` for coordinate faces
    * ``PRIME_ARGUMENTS`` - ``argparse.ArgumentParser`` for flag primes
    * ``OUTPUT_ARGUMENTS`` - ``argparse.ArgumentParser`` for output paths
    * ``RUN_ARGUMENTS`` - ``argparse.ArgumentParser`` for run settings
    * ``CACHE_VARIABLE`` - Environment variable naming the count cache

Functions:

    * ``parse_levels`` - Read ``"8..48"`` or ``"12,24"``
    * ``parse_faces`` - Read ``"all"`` or ``"0,1;1,2"``
    * ``parse_primes`` - Read ``"11,13"``
    * ``level_progress`` - Progress bar over a number of levels

Classes:

    * ``RunConfig`` - Validated settings of one run
    * ``LevelCache`` - Per-(model, face, m) count cache on disk

.. image:: classes_ui_utils.svg
"""

from argparse import ArgumentParser
from fractions import Fraction
import hashlib
import logging
import os

from progressbar import Bar, Percentage, ProgressBar
import simplejson
from sympy import isprime

from adelic_okounkov.adelic_model import all_faces
from adelic_okounkov.exceptions import (ConfigError, InvalidFaceError,
                                        InvalidLevelRangeError,
                                        InvalidToleranceError)
from adelic_okounkov.lattice_core import CountResult

logger = logging.getLogger(__name__)

#: Environment variable with the directory of the count cache
CACHE_VARIABLE = "ADELIC_OKOUNKOV_CACHE"

#: Command line arguments for the model file
MODEL_ARGUMENTS = ArgumentParser(add_help=False)
MODEL_ARGUMENTS.add_argument("model", help="Path to a model JSON file.")

#: Command line arguments for the sampled levels
LEVEL_ARGUMENTS = ArgumentParser(add_help=False)
LEVEL_ARGUMENTS.add_argument("--m", dest="levels",
                             help="Levels as a range 'a..b' or a comma "
                             "separated list.")
LEVEL_ARGUMENTS.add_argument("--m-max",
                             help="Largest level for base loci and "
                             "semigroups.")

#: Command line arguments for coordinate faces
FACE_ARGUMENTS = ArgumentParser(add_help=False)
FACE_ARGUMENTS.add_argument("--face",
                            help="'all' for the whole space, 'each' for "
                            "every coordinate face, or index lists such as "
                            "'0,1;1,2'.")

#: Command line arguments for the primes of the flags
PRIME_ARGUMENTS = ArgumentParser(add_help=False)
PRIME_ARGUMENTS.add_argument("--p", dest="primes",
                             help="Comma separated primes.")

#: Command line arguments for output paths
OUTPUT_ARGUMENTS = ArgumentParser(add_help=False)
OUTPUT_ARGUMENTS.add_argument("--output",
                              help="Folder to write reports to.")
OUTPUT_ARGUMENTS.add_argument("--settings",
                              help="JSON file with run settings, applied "
                              "before the command line.")

#: Command line arguments for the run itself
RUN_ARGUMENTS = ArgumentParser(add_help=False)
RUN_ARGUMENTS.add_argument("--jobs", help="Number of worker processes, "
                           "defaults to the number of cores.")
RUN_ARGUMENTS.add_argument("--deterministic", action="store_true",
                           help="Run sequentially.")
RUN_ARGUMENTS.add_argument("--verbose", action="store_true",
                           help="Log progress information.")
RUN_ARGUMENTS.add_argument("--tolerance",
                           help="Relative tolerance of estimate checks.")
RUN_ARGUMENTS.add_argument("--extrapolate", action="store_true",
                           help="Extrapolate volume estimates in "
                           "log(m)/m.")


def parse_levels(text):
    """Return the sorted levels of ``"a..b"`` or ``"a,b,c"``."""
    text = str(text).replace(" ", "")
    try:
        if ".." in text:
            start, stop = text.split("..")
            levels = list(range(int(start), int(stop) + 1))
        else:
            levels = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise InvalidLevelRangeError("Cannot read levels {!r}.".format(text))
    if not levels or min(levels) < 1:
        raise InvalidLevelRangeError("Levels must be a nonempty set of "
                                     "positive integers, got {!r}."
                                     .format(text))
    return sorted(set(levels))


def parse_faces(text):
    """
    Return ``None`` for ``"all"``, ``"each"`` for every coordinate face, or
    a list of index tuples.
    """
    text = str(text).replace(" ", "")
    if text in ("all", "each"):
        return None if text == "all" else text
    faces = []
    for part in text.split(";"):
        try:
            face = tuple(sorted({int(x) for x in part.split(",") if x}))
        except ValueError:
            raise InvalidFaceError("Cannot read face {!r}.".format(part))
        if not face or face[0] < 0:
            raise InvalidFaceError("Faces are nonempty sets of coordinate "
                                   "indices, got {!r}.".format(part))
        faces.append(face)
    return faces


def parse_primes(text):
    try:
        primes = [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError("Cannot read primes {!r}.".format(text))
    bad = [p for p in primes if not isprime(p)]
    if not primes or bad:
        raise ConfigError("Flags need primes, got {!r}.".format(text))
    return primes


def level_progress(total):
    """Started progress bar and the callback that advances it."""
    progress = ProgressBar(max_value=max(total, 1),
                           widgets=[Bar("=", "[", "]"), " ", Percentage()])
    progress.start()
    return progress, progress.update


class RunConfig(object):

    """
    Settings of one run.

    Every setting is a property whose setter validates and normalises the
    value, raising a ``ConfigError`` subclass for bad input. ``parameters``
    lists what ``save_settings`` writes and ``load_settings`` reads.
    """

    #: Settings that are serialised
    parameters = ("model_path", "command", "levels", "m_max", "faces",
                  "primes", "tolerance", "output", "jobs", "deterministic",
                  "extrapolate")

    def __init__(self, settings=None, **values):
        self._levels = list(range(1, 9))
        self._m_max = 10
        self._faces = None
        self._primes = [11]
        self._tolerance = 0.15
        self._jobs = os.cpu_count() or 1
        #: Path of the model file
        self.model_path = None
        #: Subcommand, for instance ``"avol"`` or ``"verify yuan"``
        self.command = None
        #: Folder reports are written to
        self.output = "."
        #: Whether jobs run sequentially
        self.deterministic = False
        #: Whether volume estimates are extrapolated
        self.extrapolate = False
        if settings:
            self.load_settings(settings)
        for key, value in values.items():
            self.__setattr__(key, value)

    @property
    def levels(self):
        """Sorted levels m."""
        return self._levels

    @levels.setter
    def levels(self, value):
        if isinstance(value, str):
            value = parse_levels(value)
        value = sorted({int(m) for m in value})
        if not value or value[0] < 1:
            raise InvalidLevelRangeError("Levels must be positive integers.")
        self._levels = value

    @property
    def m_max(self):
        """Largest level for base loci, generation and semigroups."""
        return self._m_max

    @m_max.setter
    def m_max(self, value):
        try:
            value = int(value)
        except (TypeError, ValueError):
            raise InvalidLevelRangeError("m-max must be an integer.")
        if value < 1:
            raise InvalidLevelRangeError("m-max must be at least 1.")
        self._m_max = value

    @property
    def faces(self):
        """``None`` (whole space), ``"each"`` or a list of faces."""
        return self._faces

    @faces.setter
    def faces(self, value):
        if isinstance(value, str):
            value = parse_faces(value)
        elif value is not None:
            value = [tuple(sorted(face)) for face in value]
        self._faces = value

    @property
    def primes(self):
        return self._primes

    @primes.setter
    def primes(self, value):
        if isinstance(value, (str, int)):
            value = parse_primes(str(value))
        else:
            value = parse_primes(",".join(str(p) for p in value))
        self._primes = value

    @property
    def tolerance(self):
        """Relative tolerance in ``(0, 1]``."""
        return self._tolerance

    @tolerance.setter
    def tolerance(self, value):
        try:
            value = float(Fraction(str(value)))
        except (TypeError, ValueError, ZeroDivisionError):
            raise InvalidToleranceError("Cannot read tolerance {!r}."
                                        .format(value))
        if not 0 < value <= 1:
            raise InvalidToleranceError("Tolerance must lie in (0, 1], got "
                                        "{}.".format(value))
        self._tolerance = value

    @property
    def jobs(self):
        """Worker processes; 1 for deterministic runs."""
        return 1 if self.deterministic else self._jobs

    @jobs.setter
    def jobs(self, value):
        if value is None:
            value = os.cpu_count() or 1
        try:
            value = int(value)
        except (TypeError, ValueError):
            raise ConfigError("Jobs must be an integer.")
        if value < 1:
            raise ConfigError("Jobs must be at least 1.")
        self._jobs = value

    def face_list(self, model):
        """Faces of ``model`` the run is about."""
        if self.faces is None:
            return [model.check_face(None)]
        if self.faces == "each":
            return all_faces(model.dim)
        return [model.check_face(face) for face in self.faces]

    @classmethod
    def from_arguments(cls, args):
        """Build a config from parsed command line arguments."""
        config = cls(getattr(args, "settings", None))
        config.model_path = getattr(args, "model", None)
        config.command = " ".join(part for part in (
            getattr(args, "command", None), getattr(args, "action", None))
            if part)
        for name in ("levels", "m_max", "faces", "primes", "tolerance",
                     "output", "jobs"):
            source = "face" if name == "faces" else name
            if getattr(args, source, None) is not None:
                config.__setattr__(name, getattr(args, source))
        config.deterministic = (config.deterministic or
                                getattr(args, "deterministic", False))
        config.extrapolate = (config.extrapolate or
                              getattr(args, "extrapolate", False))
        return config

    def to_json(self):
        settings = {}
        for parameter in self.parameters:
            settings[parameter] = self.__getattribute__(parameter)
        if isinstance(settings["faces"], list):
            settings["faces"] = [list(face) for face in settings["faces"]]
        return settings

    def load_settings(self, settings):
        """Load settings from file"""
        with open(settings) as settings_file:
            settings_dict = simplejson.load(settings_file)
        for key, value in settings_dict.items():
            if key not in self.parameters:
                raise ConfigError("Unknown setting {!r}.".format(key))
            self.__setattr__(key, value)

    def save_settings(self, settings_file):
        """Save run settings to a file"""
        with open(settings_file, "w") as settings_file:
            simplejson.dump(self.to_json(), settings_file, sort_keys=True)


class LevelCache(object):

    """
    Counts keyed by the SHA-256 of model digest, face and level.

    Each entry is one JSON file in ``directory``. ``from_environment``
    returns ``None`` unless ``ADELIC_OKOUNKOV_CACHE`` is set.
    """

    def __init__(self, directory):
        #: Folder holding the entries
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    @classmethod
    def from_environment(cls):
        directory = os.environ.get(CACHE_VARIABLE)
        return cls(directory) if directory else None

    def _path(self, model, face, level):
        key = "{}:{}:{}".format(model.digest(), list(face), level)
        name = hashlib.sha256(key.encode("utf-8")).hexdigest()
        return os.path.join(self.directory, name + ".json")

    def get(self, model, face, level):
        path = self._path(model, face, level)
        if not os.path.exists(path):
            return None
        with open(path) as entry:
            try:
                return CountResult.from_dict(simplejson.load(entry))
            except (simplejson.JSONDecodeError, KeyError):
                logger.warning("Ignoring corrupt cache entry %s", path)
                return None

    def put(self, model, face, level, count):
        with open(self._path(model, face, level), "w") as entry:
            simplejson.dump(count.as_dict(), entry, sort_keys=True)
