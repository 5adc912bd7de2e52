import importlib
import os

from omegaconf import DictConfig, ListConfig, OmegaConf

from lgdiv.errors import ParseError
from lgdiv.literals import format_matrix_literal, parse_group_text
from lgdiv.models.matgroup import GL2Element, close

PACKAGE = "lgdiv"


def instantiate_from_config(config, **overrides):
    if not "target" in config:
        raise KeyError("Expected key `target` to instantiate.")
    params = config.get("params", dict())
    if isinstance(params, (DictConfig, ListConfig)):
        params = OmegaConf.to_container(params, resolve=True)
    params = dict(params or {})
    params.update(overrides)
    return get_obj_from_str(config["target"])(**params)


def get_obj_from_str(string, reload=False):
    module, cls = string.rsplit(".", 1)
    package = PACKAGE if module.startswith(".") else None
    if reload:
        module_imp = importlib.import_module(module, package=package)
        importlib.reload(module_imp)
    return getattr(importlib.import_module(module, package=package), cls)


def load_group_text(text, modulus=None, cap=None):
    q, gens = parse_group_text(text, modulus=modulus)
    elements = []
    for g in gens:
        try:
            elements.append(GL2Element(g, q))
        except ValueError as exc:
            raise ParseError(str(exc), token=format_matrix_literal(g)) from exc
    if cap is None:
        return close(elements, modulus=q)
    return close(elements, cap=cap, modulus=q)


def load_group_file(path, modulus=None, cap=None):
    with open(path, "r") as f:
        return load_group_text(f.read(), modulus=modulus, cap=cap)


def load_groups_from_dir(data_dir, modulus=None, cap=None):
    """ Every *.txt group file in data_dir, sorted by name. """
    names = sorted(n for n in os.listdir(data_dir) if n.endswith(".txt"))
    return {n: load_group_file(os.path.join(data_dir, n), modulus=modulus, cap=cap) for n in names}
