# setup.py

from setuptools import setup, find_packages

setup(
    name="curvebound",
    version="0.1.0",
    description="Bound states, Gershgorin bounds and RG flows for delta interactions on closed curves",
    author="Your Name",
    packages=find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.8",
    install_requires=[
        'numpy>=1.22.0',
        'scipy>=1.10.0',  # trapezoid, DOP853, periodic CubicSpline
        'rich>=13.0.0',
        'tomli>=2.0.0',
    ],
    extras_require={
        'dev': [
            'pytest>=7.0.0',
            'black>=22.0.0',
            'isort>=5.0.0',
            'mypy>=1.0.0',
        ]
    },
    entry_points={
        'console_scripts': [
            'curvebound=curvebound.cli:main',
        ],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Topic :: Scientific/Engineering :: Physics',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
)
