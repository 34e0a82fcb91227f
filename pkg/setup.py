
from setuptools import setup


def setup_package():

    META_DATA = dict(
        tests_require=[
            'pytest>=6',
        ],
        zip_safe=False,
        )

    setup(**META_DATA)


if __name__ == '__main__':
    setup_package()
