import dataclasses

import numpy as np
import simplejson as json


class Encoder(json.JSONEncoder):
    """Extends json.JSONEncoder with additional capabilities/configurations."""

    def default(self, o):
        if dataclasses.is_dataclass(o) and not isinstance(o, type):
            return dataclasses.asdict(o)

        elif isinstance(o, np.ndarray):
            return o.tolist()

        elif isinstance(o, np.generic):
            return o.item()

        elif isinstance(o, complex):
            return {"real": o.real, "imag": o.imag}

        elif isinstance(o, bytes):
            return o.decode("utf-8")

        return json.JSONEncoder.default(self, o)


def to_json(obj, **kwargs):
    indent = kwargs.pop("indent", 2)
    return json.dumps(obj, cls=Encoder, indent=indent, ignore_nan=True, **kwargs)
