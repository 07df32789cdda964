from setuptools import setup

setup(
    name='eigenbath',
    version='0.1.0',
    install_requires=[
        'atomicwrites',
        'colorama',
        'Jinja2',
        'numpy',
        'pytablewriter',
        'scipy',
        'termcolor',
        'toml',
    ],
    extras_require={
        'test': ['pytest'],
    },
)
