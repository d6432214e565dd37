import configparser
import glob
import logging
import os

from .chernoff import BisectionConfig
from .errors import RangeError
from .oracle import IntegrationSpec

logger = logging.getLogger(__name__)

DEFAULT_PATH = "~/.chernoff_info"

BISECTION_KEYS = {"alpha_tolerance": float, "gap_tolerance": float, "max_iterations": int}
ORACLE_KEYS = {"tail_epsilon": float, "abs_tolerance": float, "range_sigmas": float, "mc_samples": int}
SECTIONS = {"bisection": BISECTION_KEYS, "oracle": ORACLE_KEYS}


class SolverConfig(object):
    """
    Easy access to the solver settings stored in the *.cfg files of ~/.chernoff_info.
    """

    def __init__(self, path=None):
        self.path = os.path.expanduser(path or DEFAULT_PATH)
        self.parser = configparser.ConfigParser()
        for f in sorted(glob.iglob(os.path.join(self.path, "*.cfg"))):
            with open(f) as fp:
                self.parser.read_file(fp)
            logger.debug("Read solver settings from %s", f)

    def get(self, section, key):
        if self.parser.has_section(section):
            if self.parser.has_option(section, key):
                return self.parser.get(section, key)
        return None

    def set(self, section, key, value):
        """Store one known setting; unknown sections or keys are a TypeError."""
        if key not in SECTIONS.get(section, {}):
            raise TypeError("Unknown [%s] setting '%s'" % (section, key))
        if not self.parser.has_section(section):
            self.parser.add_section(section)
        self.parser.set(section, key, repr(SECTIONS[section][key](value)))

    def save(self):
        """
        Writes the merged settings to solver.cfg in the settings directory, creating it if needed.
        """
        if not os.path.exists(self.path):
            os.makedirs(self.path)
        target = os.path.join(self.path, "solver.cfg")
        with open(target, "w") as fp:
            self.parser.write(fp)
        logger.info("Saved solver settings to %s", target)

    def _values(self, section, keys, overrides):
        values = {}
        for key, kind in keys.items():
            raw = self.get(section, key)
            if raw is not None:
                try:
                    values[key] = kind(raw)
                except ValueError:
                    raise RangeError("Setting [%s] %s = %r is not a valid %s" % (section, key, raw, kind.__name__))
        for key, value in overrides.items():
            if key not in keys:
                raise TypeError("Unknown [%s] setting '%s'" % (section, key))
            if value is not None:
                values[key] = value
        return values

    def bisection_config(self, **overrides):
        """BisectionConfig from the [bisection] section, with non-None overrides taking precedence."""
        return BisectionConfig(**self._values("bisection", BISECTION_KEYS, overrides))

    def integration_spec(self, **overrides):
        """IntegrationSpec from the [oracle] section; overrides may also set the scheme."""
        scheme = overrides.pop("scheme", None)
        return IntegrationSpec(scheme=scheme, **self._values("oracle", ORACLE_KEYS, overrides))
