# Copyright 2021 Huawei Technologies Co., Ltd
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ============================================================================

"""Parse arguments"""

import os
import ast
import argparse
from pprint import pformat
import yaml


class Config:
    """
    Configuration namespace. Convert dictionary to members.
    """

    def __init__(self, cfg_dict):
        for k, v in cfg_dict.items():
            if isinstance(v, (list, tuple)):
                setattr(self, k, [Config(x) if isinstance(x, dict) else x for x in v])
            else:
                setattr(self, k, Config(v) if isinstance(v, dict) else v)

    def __str__(self):
        return pformat(self.__dict__)

    def __repr__(self):
        return self.__str__()


def _add_scalar_flags(parser, cfg, helper, choices, cfg_path):
    """
    One flag per scalar key; underscored keys also get a hyphenated alias.
    """
    for item in cfg:
        if isinstance(cfg[item], (list, dict)):
            continue
        help_description = helper[item] if item in helper else "Please reference to {}".format(cfg_path)
        choice = choices[item] if item in choices else None
        names = ["--" + item]
        if "_" in item:
            names.append("--" + item.replace("_", "-"))
        if isinstance(cfg[item], bool):
            arg_type = ast.literal_eval
        elif cfg[item] is None:
            arg_type = str
        else:
            arg_type = type(cfg[item])
        parser.add_argument(*names, dest=item, type=arg_type, default=cfg[item], choices=choice,
                            help=help_description)


def parse_cli_to_yaml(parser, cfg, helper=None, choices=None, cfg_path="default_config.yaml", argv=None):
    """
    Parse command line arguments to the configuration according to the default yaml.

    Top-level scalars are global flags, accepted after any subcommand. Each
    top-level mapping is a subcommand whose scalars become its own flags.

    Args:
        parser: Parent parser.
        cfg: Base configuration.
        helper: Helper description.
        choices: Allowed values per key.
        cfg_path: Path to the default yaml config.
        argv: Arguments to parse, sys.argv[1:] when None.
    """
    parser = argparse.ArgumentParser(prog="mspiral", description="m-spiral geometry kernel",
                                     parents=[parser])
    helper = {} if helper is None else helper
    choices = {} if choices is None else choices

    common = argparse.ArgumentParser(add_help=False)
    _add_scalar_flags(common, cfg, helper, choices, cfg_path)

    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True
    for item in cfg:
        if not isinstance(cfg[item], dict):
            continue
        sub_helper = helper.get(item, {}) or {}
        sub = commands.add_parser(item, parents=[common], help=sub_helper.get("help"))
        _add_scalar_flags(sub, cfg[item], sub_helper, choices.get(item, {}) or {}, cfg_path)
    return parser.parse_args(argv)


def parse_yaml(yaml_path):
    """
    Parse the yaml config file.

    Args:
        yaml_path: Path to the yaml config.
    """
    with open(yaml_path, "r") as fin:
        try:
            cfgs = [x for x in yaml.safe_load_all(fin.read())]
        except yaml.YAMLError as e:
            raise ValueError("Failed to parse yaml {}: {}".format(yaml_path, e)) from e
    if len(cfgs) == 1:
        cfg, cfg_helper, cfg_choices = cfgs[0], {}, {}
    elif len(cfgs) == 2:
        cfg, cfg_helper = cfgs
        cfg_choices = {}
    elif len(cfgs) == 3:
        cfg, cfg_helper, cfg_choices = cfgs
    else:
        raise ValueError("At most 3 docs (config, description for help, choices) are supported in config yaml")
    return cfg, cfg_helper or {}, cfg_choices or {}


def merge(args, cfg):
    """
    Merge the base config from yaml file and command line arguments.

    Subcommand mappings are replaced by the parsed flags, so the result is flat.

    Args:
        args: Command line arguments.
        cfg: Base configuration.
    """
    merged = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
    merged.update(vars(args))
    return merged


def get_config(argv=None):
    """
    Get Config according to the yaml file and cli arguments.
    """
    parser = argparse.ArgumentParser(description="default name", add_help=False)
    current_dir = os.path.dirname(os.path.abspath(__file__))
    parser.add_argument("--config_path", type=str, default=os.path.join(current_dir, "../default_config.yaml"),
                        help="Config file path")
    path_args, _ = parser.parse_known_args(argv)
    default, helper, choices = parse_yaml(path_args.config_path)
    args = parse_cli_to_yaml(parser=parser, cfg=default, helper=helper, choices=choices,
                             cfg_path=path_args.config_path, argv=argv)
    return Config(merge(args, default))
