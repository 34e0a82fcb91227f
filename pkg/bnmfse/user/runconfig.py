#
# Copyright 2025-2026 The bnmfse developers
#
# This file is part of bnmfse
#
# SPDX-License-Identifier: GPL-3.0+
#

"""Run configuration of the enhancement commands.

A run configuration file holds ``key = value`` lines. Lines starting
with ``#`` or ``;`` and empty lines are ignored; there are no
sections. Values given on the command line override the file, which
overrides the defaults.
"""

import dataclasses
import logging
import os
from dataclasses import dataclass

from bnmfse.exceptions import ContractError, FormatError
from bnmfse.enhance.pipeline import EnhancementConfig
from bnmfse.enhance.online import OnlineConfig
from bnmfse.nmf.model import read_model_list

_logger = logging.getLogger(__name__)

MODES = ('supervised', 'hmm', 'online')


def _path_list(value):
    return tuple(item.strip() for item in value.split(',') if item.strip())


@dataclass(frozen=True)
class RunConfig:
    mode: str = 'hmm'
    speech_model: str = None
    noise_models: tuple = ()
    model_list: str = None
    class_trace: str = None
    frame_len: int = 512
    hop: int = 256
    target_max: float = 10000.0
    seed: int = 0
    n1: int = 50
    n2: int = 15
    q: int = 5
    noise_rank: int = 30
    psi_flatten: float = 500.0
    phi_speech: float = 0.01
    phi_noise: float = 1.0
    transition_diagonal: float = 0.99
    classifier_smoothing: float = 0.95
    alpha_low_snr: float = -5.0
    alpha_low: float = 0.98
    alpha_high_snr: float = 15.0
    alpha_high: float = 0.1
    max_iter: int = 50
    tol: float = 1e-5

    @classmethod
    def keys(cls):
        return [f.name for f in dataclasses.fields(cls)]

    @classmethod
    def from_values(cls, values):
        """Build from text values, converting them to the field types."""
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwds = {}
        for key, value in values.items():
            if key not in fields:
                raise ContractError(f'unknown configuration key {key!r}')
            if value is None:
                continue
            kind = fields[key].type
            try:
                if key == 'noise_models':
                    kwds[key] = _path_list(value) if isinstance(value, str) else tuple(value)
                elif kind in ('int', int):
                    kwds[key] = int(value)
                elif kind in ('float', float):
                    kwds[key] = float(value)
                else:
                    kwds[key] = str(value)
            except ValueError as error:
                raise ContractError(f'bad value for {key!r}: {value!r}') from error
        return cls(**kwds)

    def enhancement_config(self):
        return EnhancementConfig(
            frame_len=self.frame_len, hop=self.hop, target_max=self.target_max,
            phi_speech=self.phi_speech, max_iter=self.max_iter, tol=self.tol,
            alpha_low=(self.alpha_low_snr, self.alpha_low),
            alpha_high=(self.alpha_high_snr, self.alpha_high),
            transition_diagonal=self.transition_diagonal,
            classifier_smoothing=self.classifier_smoothing
        )

    def online_config(self):
        return OnlineConfig(
            n1=self.n1, n2=self.n2, q=self.q, noise_rank=self.noise_rank,
            psi_flatten=self.psi_flatten, phi_noise=self.phi_noise, seed=self.seed
        )

    def noise_model_paths(self):
        """Noise models given directly followed by those of the model list."""
        paths = list(self.noise_models)
        if self.model_list is not None:
            paths.extend(read_model_list(self.model_list))
        return paths

    def validate(self):
        """Check the configuration before any output is written.

        Returns the noise model paths.
        """
        if self.mode not in MODES:
            raise ContractError(f'mode must be one of {", ".join(MODES)}')
        if self.speech_model is None:
            raise ContractError('a speech model is required')
        self.enhancement_config()
        self.online_config()
        if self.model_list is not None and not os.path.isfile(self.model_list):
            raise ContractError(f'model list {self.model_list} does not exist')
        paths = self.noise_model_paths() if self.mode != 'online' else []
        if self.mode == 'supervised' and len(paths) != 1:
            raise ContractError('supervised mode needs exactly one noise model')
        if self.mode == 'hmm' and not paths:
            raise ContractError('hmm mode needs at least one noise model')
        for path in [self.speech_model] + paths:
            if not os.path.isfile(path):
                raise ContractError(f'model file {path} does not exist')
        return paths


def check_outputs(*paths):
    """Raise OSError if an output file could not be created."""
    for path in paths:
        if path is None:
            continue
        directory = os.path.dirname(os.path.abspath(path)) or os.curdir
        if not os.path.isdir(directory):
            raise FileNotFoundError(f'output directory of {path} does not exist')
        if not os.access(directory, os.W_OK) or os.path.isdir(path):
            raise PermissionError(f'cannot write {path}')


def read_run_config(path):
    """Key and value pairs of a run configuration file."""
    values = {}
    with open(path) as fd:
        for lineno, line in enumerate(fd, 1):
            line = line.strip()
            if not line or line[0] in '#;':
                continue
            key, sep, value = line.partition('=')
            if not sep:
                raise FormatError(f'{path}:{lineno}: expected key = value')
            values[key.strip()] = value.strip()
    _logger.debug('read %d configuration values from %s', len(values), path)
    return values


def load_run_config(path=None, overrides=None):
    """RunConfig from defaults, an optional file and overriding values."""
    values = read_run_config(path) if path is not None else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return RunConfig.from_values(values)
