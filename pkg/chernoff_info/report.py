import json
from collections import OrderedDict

from . import __version__
from .utils import to_builtin


class Report(object):
    def __init__(self, title, version=None):
        """
        Named result sections of one computation, serialized to JSON.

        :param title: Title of the report, usually the subcommand that produced it.
        :type title: str
        :param version: Version label; defaults to the package version.
        :type version: str
        """
        self.title = title
        self.version = version or __version__
        self.results = OrderedDict()

    def add(self, name, obj):
        """Add a section; obj is a plain value, a dict, or anything with toDict()."""
        self.results[name] = obj

    def toDict(self):
        obj = OrderedDict()
        obj["title"] = self.title
        obj["version"] = self.version
        obj["chernoff_info_version"] = __version__
        obj["results"] = OrderedDict((name, to_builtin(value)) for name, value in self.results.items())
        return obj

    def toJSON(self, out):
        """Write the report to a path or an open file."""
        if hasattr(out, "write"):
            json.dump(self.toDict(), out, indent=2)
            out.write("\n")
        else:
            with open(out, "w") as fp:
                json.dump(self.toDict(), fp, indent=2)
                fp.write("\n")
